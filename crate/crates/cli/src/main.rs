//! Batch front end for the spherical-sector spectral pipeline: radial
//! Lane-Emden solutions, singular radial spectra, cap Neumann spectra,
//! Morse index assembly, bubble stability, and symmetry-breaking
//! thresholds. Outputs are deterministic CSV/JSON (plus optional SVG).

mod commands;
mod config;
mod svg;

use clap::{Parser, Subcommand};
use config::{CommonArgs, RunConfig};

#[derive(Parser)]
#[command(name = "sectorspec", version, about = "Spectra and Morse indices of radial solutions in spherical sectors and cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the Lane-Emden problem on the unit ball; emit (r, u, u', a).
    SolveRadial(CommonArgs),
    /// Negative singular radial eigenvalues of the linearized operator.
    RadialSpectrum(CommonArgs),
    /// Neumann Laplace-Beltrami spectrum of a geodesic cap (or validate an
    /// external spectrum file).
    CapSpectrum(CommonArgs),
    /// Morse index of the radial solution from the two spectra.
    Morse(CommonArgs),
    /// Bubble stability on the cone: Morse index, extremal identity sweep,
    /// quadratic forms.
    Bubble(CommonArgs),
    /// Symmetry-breaking exponent threshold and the critical-limit table.
    Threshold(CommonArgs),
}

fn main() {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::SolveRadial(a) => ("solve-radial", a),
        Command::RadialSpectrum(a) => ("radial-spectrum", a),
        Command::CapSpectrum(a) => ("cap-spectrum", a),
        Command::Morse(a) => ("morse", a),
        Command::Bubble(a) => ("bubble", a),
        Command::Threshold(a) => ("threshold", a),
    };
    let result = RunConfig::resolve(args).and_then(|cfg| match name {
        "solve-radial" => commands::cmd_solve_radial(&cfg),
        "radial-spectrum" => commands::cmd_radial_spectrum(&cfg),
        "cap-spectrum" => commands::cmd_cap_spectrum(&cfg),
        "morse" => commands::cmd_morse(&cfg),
        "bubble" => commands::cmd_bubble(&cfg),
        "threshold" => commands::cmd_threshold(&cfg),
        _ => unreachable!(),
    });
    if let Err(err) = result {
        let record = error_record(name, &err);
        eprintln!("{}", serde_json::to_string(&record).unwrap());
        std::process::exit(1);
    }
}

/// Machine-readable error record: the module of origin, a stable class
/// name, and the human message.
fn error_record(command: &str, err: &anyhow::Error) -> serde_json::Value {
    let (module, class) = if let Some(ce) = err.downcast_ref::<commands::CommandError>() {
        (ce.module, ce.source.class())
    } else if err.downcast_ref::<commands::VerifyMismatch>().is_some() {
        ("cli", "verify-mismatch")
    } else {
        ("cli", "invalid-config")
    };
    serde_json::json!({
        "error": {
            "command": command,
            "module": module,
            "class": class,
            "message": format!("{err:#}"),
        }
    })
}
