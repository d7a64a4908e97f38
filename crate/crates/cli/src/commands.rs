//! The six pipeline commands. Each validates its configuration, runs the
//! corresponding solvers, and emits deterministic CSV/JSON (and optional
//! SVG) into the output directory.

use crate::config::{DomainSource, Format, RunConfig};
use crate::svg;
use anyhow::{bail, Context, Result};
use sectorspec::bubble::{
    eta_residual, eta_value, limit_row, q_u_on_bubble, step1_quadratic_form, AngularMode,
    LimitRow, LimitTable,
};
use sectorspec::cap::{angular_eigenfunction, cap_neumann_eigenvalues, load_spectrum, CapDomain, CapSpectrum};
use sectorspec::morse::{
    bubble_morse, morse_index_direct, symmetry_breaking_threshold, verify_count_equality,
    ThresholdOutcome,
};
use sectorspec::radial::{solve_lane_emden, LinearizedPotential};
use sectorspec::singular::{
    dense_oracle_singular, negative_singular_eigenvalues, oracle_spacing, SingularSpectrum,
};
use std::fmt;
use std::path::PathBuf;

/// An error carrying the module it came from, for the machine-readable
/// error record.
#[derive(Debug)]
pub struct CommandError {
    pub module: &'static str,
    pub source: sectorspec::Error,
}

impl fmt::Display for CommandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.module, self.source)
    }
}

impl std::error::Error for CommandError {}

/// Verification mode found a disagreement between the two routes.
#[derive(Debug)]
pub struct VerifyMismatch(pub String);

impl fmt::Display for VerifyMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "verification mismatch: {}", self.0)
    }
}

impl std::error::Error for VerifyMismatch {}

fn in_module<T>(module: &'static str, r: sectorspec::Result<T>) -> Result<T> {
    r.map_err(|source| CommandError { module, source }.into())
}

fn write_out(cfg: &RunConfig, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(&cfg.out)
        .with_context(|| format!("creating {}", cfg.out.display()))?;
    let path = cfg.out.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(path)
}

fn write_json(cfg: &RunConfig, name: &str, value: &serde_json::Value) -> Result<()> {
    if cfg.wants(Format::Json) {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        write_out(cfg, name, &text)?;
    }
    Ok(())
}

fn angular_spectrum(cfg: &RunConfig, lambda_max: f64) -> Result<CapSpectrum> {
    match cfg.require_domain()? {
        DomainSource::Cap { theta0 } => in_module(
            "cap_spectrum",
            cap_neumann_eigenvalues(cfg.n_dim, *theta0, lambda_max),
        ),
        DomainSource::Spectrum(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let spec = in_module("cap_spectrum", load_spectrum(&text))?;
            if spec.n_dim != cfg.n_dim {
                bail!(
                    "spectrum file has N = {}, run requested N = {}",
                    spec.n_dim,
                    cfg.n_dim
                );
            }
            Ok(spec)
        }
    }
}

fn radial_pipeline(cfg: &RunConfig) -> Result<(f64, LinearizedPotential, SingularSpectrum)> {
    let p = cfg.require_p()?;
    let sol = in_module(
        "radial_solver",
        solve_lane_emden(cfg.n_dim, p, cfg.tol_or(1e-9).min(1e-8)),
    )?;
    let a = sol.linearization();
    let spec = in_module(
        "singular_spectrum",
        negative_singular_eigenvalues(cfg.n_dim, &a, cfg.k_max, cfg.tol_or(1e-9)),
    )?;
    Ok((p, a, spec))
}

pub fn cmd_solve_radial(cfg: &RunConfig) -> Result<()> {
    let p = cfg.require_p()?;
    let sol = in_module(
        "radial_solver",
        solve_lane_emden(cfg.n_dim, p, cfg.tol_or(1e-9).min(1e-8)),
    )?;
    if cfg.wants(Format::Csv) {
        write_out(cfg, "radial_solution.csv", &sol.to_csv())?;
    }
    write_json(cfg, "radial_solution.json", &sol.header_json())?;
    Ok(())
}

pub fn cmd_radial_spectrum(cfg: &RunConfig) -> Result<()> {
    let (_, a, spec) = radial_pipeline(cfg)?;
    let mut doc = spec.to_json();
    if cfg.verify {
        let grid_n = 4000;
        let oracle = in_module(
            "singular_spectrum",
            dense_oracle_singular(cfg.n_dim, &a, grid_n),
        )?;
        let h = oracle_spacing(grid_n);
        let tol = 1e-6f64.max(10.0 * h * h);
        if oracle.len() != spec.eigenvalues.len() {
            bail!(VerifyMismatch(format!(
                "oracle found {} negative eigenvalues, shooting found {}",
                oracle.len(),
                spec.eigenvalues.len()
            )));
        }
        let mut max_diff = 0.0f64;
        for (e, o) in spec.eigenvalues.iter().zip(&oracle) {
            let diff = (e.value - o).abs();
            if diff > tol * e.value.abs().max(1.0) {
                bail!(VerifyMismatch(format!(
                    "eigenvalue {}: shooting {} vs oracle {o} (tol {tol:.3e})",
                    e.k, e.value
                )));
            }
            max_diff = max_diff.max(diff);
        }
        doc["verify"] = serde_json::json!({
            "oracle_grid": grid_n,
            "oracle_eigenvalues": oracle,
            "max_difference": max_diff,
            "tolerance": tol,
            "pass": true,
        });
    }
    write_json(cfg, "radial_spectrum.json", &doc)?;
    if cfg.wants(Format::Csv) {
        let mut csv = String::from("k,value,zeros\n");
        for e in &spec.eigenvalues {
            csv.push_str(&format!("{},{},{}\n", e.k, e.value, e.zeros));
        }
        write_out(cfg, "radial_spectrum.csv", &csv)?;
    }
    Ok(())
}

pub fn cmd_cap_spectrum(cfg: &RunConfig) -> Result<()> {
    let lambda_max = cfg.lambda_max.unwrap_or(30.0);
    let spec = angular_spectrum(cfg, lambda_max)?;
    write_json(cfg, "cap_spectrum.json", &spec.to_json())?;
    if cfg.wants(Format::Csv) {
        let mut csv = String::from("lambda,ell,mode,multiplicity\n");
        for e in &spec.entries {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                e.lambda,
                e.ell.map(|v| v.to_string()).unwrap_or_default(),
                e.mode.map(|v| v.to_string()).unwrap_or_default(),
                e.multiplicity
            ));
        }
        write_out(cfg, "cap_spectrum.csv", &csv)?;
    }
    Ok(())
}

pub fn cmd_morse(cfg: &RunConfig) -> Result<()> {
    let (p, a, radial) = radial_pipeline(cfg)?;
    // enumerate far enough for the direct count, and for the two-route
    // verification when requested
    let mut need = radial.first().map(|l| -l).unwrap_or(1.0) * 1.02;
    if cfg.verify {
        need = need.max(a.sup * 1.02);
    }
    let lambda_max = cfg.lambda_max.unwrap_or(need).max(need);
    let angular = angular_spectrum(cfg, lambda_max)?;
    let report = in_module("morse", morse_index_direct(&radial, &angular))?;
    if report.m != report.formula_m {
        bail!(VerifyMismatch(format!(
            "direct count {} != closed-form count {}",
            report.m, report.formula_m
        )));
    }
    let mut doc = serde_json::to_value(&report)?;
    doc["p"] = serde_json::json!(p);
    if cfg.verify {
        let (k_std, k_hat) = in_module("morse", verify_count_equality(cfg.n_dim, &a, &angular))?;
        if k_std != k_hat {
            bail!(VerifyMismatch(format!(
                "standard-route count {k_std} != singular-route count {k_hat}"
            )));
        }
        doc["verify"] = serde_json::json!({
            "k_standard_route": k_std,
            "k_singular_route": k_hat,
            "pass": true,
        });
    }
    write_json(cfg, "morse_report.json", &doc)?;
    if cfg.wants(Format::Csv) {
        let mut csv = String::from("k,j,lambda_sum,multiplicity\n");
        for pr in &report.pairs {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                pr.k, pr.j, pr.lambda_sum, pr.multiplicity
            ));
        }
        write_out(cfg, "morse_pairs.csv", &csv)?;
    }
    Ok(())
}

pub fn cmd_bubble(cfg: &RunConfig) -> Result<()> {
    let n_dim = cfg.n_dim;
    let bound = (n_dim - 1) as f64;
    let lambda_max = cfg.lambda_max.unwrap_or(bound + 2.0).max(bound + 1e-6);
    let angular = angular_spectrum(cfg, lambda_max)?;
    let m_u = in_module("morse", bubble_morse(&angular, n_dim))?;

    // eta residual sweep
    let radii: Vec<f64> = (0..50)
        .map(|i| 1e-2 * (1e4f64).powf(i as f64 / 49.0))
        .collect();
    let mut eta_csv = String::from("r,eta,residual\n");
    let mut eta_max = 0.0f64;
    for &r in &radii {
        let res = eta_residual(n_dim, r);
        eta_max = eta_max.max(res.abs() / eta_value(n_dim, r).abs().max(1.0));
        eta_csv.push_str(&format!("{},{},{}\n", r, eta_value(n_dim, r), res));
    }
    if cfg.wants(Format::Csv) {
        write_out(cfg, "eta_residuals.csv", &eta_csv)?;
    }

    // negative-direction quadratic forms and Q_U(U): cap domains only
    // (they need eigenfunctions and the cap measure)
    let (theta0, step1, qu) = match angular.domain {
        CapDomain::Cap { theta0 } => {
            let mut rows = Vec::new();
            let mut control_done = false;
            for e in angular.entries.iter().filter(|e| e.lambda > 0.0) {
                if e.lambda >= bound && control_done {
                    continue;
                }
                let (th, g, _) = in_module(
                    "cap_spectrum",
                    angular_eigenfunction(n_dim, e.ell.unwrap(), theta0, e.lambda, 600),
                )?;
                let q = in_module(
                    "bubble",
                    step1_quadratic_form(
                        n_dim,
                        &AngularMode {
                            ell: e.ell.unwrap(),
                            lambda: e.lambda,
                            thetas: th,
                            values: g,
                        },
                    ),
                )?;
                if e.lambda >= bound {
                    control_done = true;
                }
                rows.push(serde_json::json!({
                    "ell": e.ell,
                    "lambda": e.lambda,
                    "q_value": q,
                    "negative": q < 0.0,
                }));
            }
            let qu = in_module("bubble", q_u_on_bubble(n_dim, theta0))?;
            (
                serde_json::json!(theta0),
                serde_json::Value::Array(rows),
                serde_json::to_value(qu)?,
            )
        }
        CapDomain::External => (
            serde_json::json!("external"),
            serde_json::Value::Null,
            serde_json::Value::Null,
        ),
    };

    let doc = serde_json::json!({
        "N": n_dim,
        "theta0": theta0,
        "lambda1": angular.lambda1(),
        "bubble_morse_index": m_u,
        "eta_residual_max_relative": eta_max,
        "q_u_on_bubble": qu,
        "step1_forms": step1,
    });
    write_json(cfg, "bubble_report.json", &doc)?;
    Ok(())
}

/// Evaluate limit rows across a small worker pool; rows are independent.
fn limit_rows_parallel(n_dim: u32, ps: &[f64], tol: f64, jobs: usize) -> Result<Vec<LimitRow>> {
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;
    let next = AtomicUsize::new(0);
    let out: Mutex<Vec<Option<sectorspec::Result<LimitRow>>>> =
        Mutex::new((0..ps.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(ps.len()).max(1) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= ps.len() {
                    break;
                }
                let row = limit_row(n_dim, ps[i], tol);
                out.lock().unwrap()[i] = Some(row);
            });
        }
    });
    let rows = out.into_inner().unwrap();
    rows.into_iter()
        .map(|r| in_module("bubble", r.expect("worker filled every row")))
        .collect()
}

pub fn cmd_threshold(cfg: &RunConfig) -> Result<()> {
    let n_dim = cfg.n_dim;
    let p_s = sectorspec::critical_exponent(n_dim);
    let lambda_max = cfg.lambda_max.unwrap_or(2.0 * n_dim as f64);
    let angular = angular_spectrum(cfg, lambda_max)?;
    let outcome = in_module(
        "morse",
        symmetry_breaking_threshold(n_dim, &angular, cfg.tol_or(1e-4)),
    )?;

    // exponent sweep for the limit table (independent of the domain)
    let (p_from, p_to, steps) = cfg.sweep.unwrap_or((
        1.0 + 0.75 * (p_s - 1.0),
        p_s - 0.002 * (p_s - 1.0),
        5,
    ));
    let ps: Vec<f64> = (0..steps)
        .map(|i| p_from + (p_to - p_from) * i as f64 / (steps - 1) as f64)
        .collect();
    let rows = limit_rows_parallel(n_dim, &ps, 1e-10, cfg.jobs)?;
    let table = LimitTable { n_dim, rows };
    if cfg.wants(Format::Csv) {
        write_out(cfg, "limit_table.csv", &table.to_csv())?;
    }
    if cfg.wants(Format::Svg) {
        let pts: Vec<(f64, f64)> = table.rows.iter().map(|r| (r.p, r.gap)).collect();
        let stamp = cfg.stamp.then(|| {
            format!(
                "unix {}",
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .unwrap()
                    .as_secs()
            )
        });
        let chart = svg::line_chart(
            "gap to -(N-1) of the first singular eigenvalue",
            "p",
            "gap",
            &pts,
            stamp.as_deref(),
        );
        write_out(cfg, "gap.svg", &chart)?;
    }

    match outcome {
        ThresholdOutcome::NoBreakingDetected { lambda1, bound } => {
            let l1 = if lambda1.is_finite() {
                serde_json::json!(lambda1)
            } else {
                serde_json::Value::Null
            };
            let doc = serde_json::json!({
                "N": n_dim,
                "no_breaking_detected": true,
                "lambda1": l1,
                "bound": bound,
            });
            write_json(cfg, "threshold.json", &doc)?;
            if cfg.wants(Format::Csv) {
                write_out(cfg, "threshold_sweep.csv", "p,lambda_hat_1_rad,sum\n")?;
            }
        }
        ThresholdOutcome::Bracketed(res) => {
            let mut doc = serde_json::to_value(&*res)?;
            doc["no_breaking_detected"] = serde_json::json!(false);
            write_json(cfg, "threshold.json", &doc)?;
            if cfg.wants(Format::Csv) {
                let mut csv = String::from("p,lambda_hat_1_rad,sum\n");
                for s in &res.samples {
                    csv.push_str(&format!("{},{},{}\n", s.p, s.lambda_hat_1, s.sum));
                }
                write_out(cfg, "threshold_sweep.csv", &csv)?;
            }
        }
    }
    Ok(())
}
