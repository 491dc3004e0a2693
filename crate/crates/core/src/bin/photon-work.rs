use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use photon_work::config::parse_config;
use photon_work::run::run;

/// Quantum work and generalized heat of a single-photon pulse on a
/// two-level emitter.
#[derive(Debug, Parser)]
#[command(name = "photon-work", version)]
struct Cli {
    /// Flat key=value configuration file.
    config: PathBuf,

    /// Output path prefix (overrides `out`).
    #[arg(long)]
    out: Option<String>,

    /// Time step (overrides `step`).
    #[arg(long)]
    step: Option<f64>,

    /// Full-cycle population tolerance (overrides `cycle_tol`).
    #[arg(long = "cycle-tol")]
    cycle_tol: Option<f64>,
}

/// Runs one invocation and returns its exit status: 0 on success, 1 on a
/// configuration or run error, 2 when an enforced invariant is violated.
fn execute(cli: Cli, stdout: &mut impl Write, stderr: &mut impl Write) -> u8 {
    let result = std::fs::read_to_string(&cli.config)
        .map_err(photon_work::Error::from)
        .and_then(|text| parse_config(&text))
        .and_then(|c| c.with_overrides(cli.out, cli.step, cli.cycle_tol))
        .and_then(|c| run(&c));
    match result {
        Ok(outcome) => {
            for f in &outcome.files {
                let _ = writeln!(stdout, "{}", f.display());
            }
            for v in &outcome.violations {
                let _ = writeln!(stderr, "invariant violated: {v}");
            }
            outcome.exit_code() as u8
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(execute(cli, &mut std::io::stdout(), &mut std::io::stderr()))
}
