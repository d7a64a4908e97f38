//! Run configuration: CLI flags merged over an optional TOML document.
//! Flags win; the file supplies defaults for anything not given.

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;
use std::collections::BTreeSet;
use std::path::PathBuf;

/// Environment variable supplying the default output directory.
pub const OUT_ENV: &str = "SECTORSPEC_OUT";

#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Ambient dimension N >= 3.
    #[arg(long = "N")]
    pub n_dim: Option<u32>,

    /// Lane-Emden exponent p in (1, (N+2)/(N-2)).
    #[arg(long)]
    pub p: Option<f64>,

    /// Sweep start exponent (threshold/limit commands).
    #[arg(long)]
    pub p_from: Option<f64>,

    /// Sweep end exponent.
    #[arg(long)]
    pub p_to: Option<f64>,

    /// Number of sweep rows.
    #[arg(long)]
    pub p_steps: Option<usize>,

    /// Cap half-angle in (0, pi). Mutually exclusive with --spectrum.
    #[arg(long)]
    pub theta0: Option<f64>,

    /// Path to an external spectrum document (JSON).
    #[arg(long)]
    pub spectrum: Option<PathBuf>,

    /// Tolerance (eigenvalue bisection / threshold bisection).
    #[arg(long)]
    pub tol: Option<f64>,

    /// Maximum number of radial eigenvalues.
    #[arg(long)]
    pub k_max: Option<usize>,

    /// Angular enumeration cutoff.
    #[arg(long)]
    pub lambda_max: Option<f64>,

    /// Output directory (default: $SECTORSPEC_OUT or the working dir).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Comma-separated output kinds: csv,json,svg.
    #[arg(long)]
    pub format: Option<String>,

    /// Cross-check against the dense finite-volume oracles / the second
    /// counting route.
    #[arg(long)]
    pub verify: bool,

    /// Worker threads for sweep rows.
    #[arg(long)]
    pub jobs: Option<usize>,

    /// Embed a timestamp in SVG output (kept out by default so outputs are
    /// byte-reproducible).
    #[arg(long)]
    pub stamp: bool,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(rename = "N")]
    n_dim: Option<u32>,
    p: Option<f64>,
    theta0: Option<f64>,
    spectrum: Option<PathBuf>,
    tol: Option<f64>,
    k_max: Option<usize>,
    lambda_max: Option<f64>,
    out: Option<PathBuf>,
    format: Option<String>,
    verify: Option<bool>,
    jobs: Option<usize>,
    stamp: Option<bool>,
    sweep: Option<SweepSection>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    p_from: Option<f64>,
    p_to: Option<f64>,
    p_steps: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Where the angular spectrum comes from.
#[derive(Clone, Debug)]
pub enum DomainSource {
    Cap { theta0: f64 },
    Spectrum(PathBuf),
}

/// Fully resolved configuration for one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n_dim: u32,
    pub p: Option<f64>,
    pub sweep: Option<(f64, f64, usize)>,
    pub domain: Option<DomainSource>,
    pub tol: Option<f64>,
    pub k_max: usize,
    pub lambda_max: Option<f64>,
    pub out: PathBuf,
    pub formats: BTreeSet<Format>,
    pub verify: bool,
    pub jobs: usize,
    pub stamp: bool,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<RunConfig> {
        let file: FileConfig = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => FileConfig::default(),
        };
        let sweep_file = file.sweep.unwrap_or_default();

        let n_dim = args.n_dim.or(file.n_dim).context("missing --N")?;
        if n_dim < 3 {
            bail!("N = {n_dim} must be at least 3");
        }
        let p_s = sectorspec::critical_exponent(n_dim);
        let p = args.p.or(file.p);
        if let Some(p) = p {
            if !(p > 1.0 && p < p_s) {
                bail!("p = {p} outside the subcritical range (1, {p_s})");
            }
        }

        let theta0 = args.theta0.or(file.theta0);
        let spectrum = args.spectrum.clone().or(file.spectrum);
        let domain = match (theta0, spectrum) {
            (Some(t), None) => {
                if !(t > 0.0 && t < std::f64::consts::PI) {
                    bail!("theta0 = {t} outside (0, pi)");
                }
                Some(DomainSource::Cap { theta0: t })
            }
            (None, Some(pathname)) => Some(DomainSource::Spectrum(pathname)),
            (None, None) => None,
            (Some(_), Some(_)) => bail!("give exactly one of --theta0 and --spectrum"),
        };

        let sweep = {
            let from = args.p_from.or(sweep_file.p_from);
            let to = args.p_to.or(sweep_file.p_to);
            let steps = args.p_steps.or(sweep_file.p_steps);
            match (from, to) {
                (Some(a), Some(b)) => {
                    if !(a > 1.0 && b < p_s && a < b) {
                        bail!("sweep [{a}, {b}] must sit inside (1, {p_s})");
                    }
                    Some((a, b, steps.unwrap_or(5).max(2)))
                }
                (None, None) => None,
                _ => bail!("--p-from and --p-to must be given together"),
            }
        };

        let out = args
            .out
            .clone()
            .or(file.out)
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));

        let format_str = args
            .format
            .clone()
            .or(file.format)
            .unwrap_or_else(|| "csv,json".to_string());
        let mut formats = BTreeSet::new();
        for tok in format_str.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            formats.insert(match tok {
                "csv" => Format::Csv,
                "json" => Format::Json,
                "svg" => Format::Svg,
                other => bail!("unknown format {other:?} (expected csv, json, svg)"),
            });
        }

        let jobs = args
            .jobs
            .or(file.jobs)
            .unwrap_or_else(|| {
                std::thread::available_parallelism()
                    .map(|n| n.get())
                    .unwrap_or(1)
            })
            .max(1);

        Ok(RunConfig {
            n_dim,
            p,
            sweep,
            domain,
            tol: args.tol.or(file.tol),
            k_max: args.k_max.or(file.k_max).unwrap_or(8),
            lambda_max: args.lambda_max.or(file.lambda_max),
            out,
            formats,
            verify: args.verify || file.verify.unwrap_or(false),
            jobs,
            stamp: args.stamp || file.stamp.unwrap_or(false),
        })
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn require_p(&self) -> Result<f64> {
        self.p.context("this command needs --p")
    }

    pub fn require_domain(&self) -> Result<&DomainSource> {
        self.domain
            .as_ref()
            .context("this command needs --theta0 or --spectrum")
    }
}
