use bouncing_cli::{run, write_outcome, Command};
use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

/// Numerical experiments for the semiclassical bouncing-ball propagator.
#[derive(Debug, Parser)]
#[command(name = "bouncing", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON config; omitted fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV output; the JSON report goes next to it with a .json extension.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Airy zero table cache (CSV), built on first use.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Accepted for interface compatibility; all refinements are deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: &Cli) -> bouncing_core::Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| bouncing_core::Error::Parameter(format!("threads: {e}")))?;
    }
    let config = cli.config.as_deref().map(std::fs::read_to_string).transpose()?;
    let outcome = run(cli.command, config.as_deref(), cli.cache.as_deref(), cli.seed)?;
    match &cli.out {
        Some(p) => write_outcome(&outcome, p)?,
        None => {
            if let Some(csv) = &outcome.csv {
                print!("{}", String::from_utf8_lossy(csv));
            }
        }
    }
    let json = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
    eprintln!("{json}");
    Ok(outcome.report.passed())
}
