//! Command layer of the `bouncing` binary: config parsing, gates, CSV and
//! JSON output. Every command computes fully in memory before any write.

pub mod commands;
pub mod report;

use bouncing_core::{Error, Result};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub use commands::CommandOutput;
pub use report::{Gate, RegressionReport, Report, Rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    DispersionScan,
    ParametrixCompare,
    ExpsumVerify,
    StrichartzScan,
    VdcTable,
    BuildCache,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::DispersionScan => "dispersion-scan",
            Command::ParametrixCompare => "parametrix-compare",
            Command::ExpsumVerify => "expsum-verify",
            Command::StrichartzScan => "strichartz-scan",
            Command::VdcTable => "vdc-table",
            Command::BuildCache => "build-cache",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub csv: Option<Vec<u8>>,
}

/// Runs `cmd` with an optional JSON config; nothing is written to disk
/// except the zero-table cache.
pub fn run(cmd: Command, config_json: Option<&str>, cache: Option<&Path>, seed: Option<u64>) -> Result<Outcome> {
    use commands::*;
    let start = Instant::now();
    let out = match cmd {
        Command::DispersionScan => dispersion::run(&parse(config_json)?, cache)?,
        Command::ParametrixCompare => parametrix::run(&parse(config_json)?, cache)?,
        Command::ExpsumVerify => expsum::run(&parse(config_json)?, cache)?,
        Command::StrichartzScan => strichartz::run(&parse(config_json)?, cache)?,
        Command::VdcTable => vdc::run(&parse(config_json)?)?,
        Command::BuildCache => cache::run(&parse(config_json)?, cache)?,
    };
    let mut echo = out.config_echo;
    if let (Some(s), serde_json::Value::Object(m)) = (seed, &mut echo) {
        // Every sup refinement is deterministic; the seed is echoed only.
        m.insert("seed".into(), s.into());
    }
    let report = Report {
        command: cmd.name().into(),
        config_echo: echo,
        gates: out.gates,
        runtime_seconds: start.elapsed().as_secs_f64(),
        regressions: out.regressions,
    };
    Ok(Outcome { report, csv: out.csv })
}

/// Sidecar path of the JSON report for a CSV at `out`.
pub fn report_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

/// Writes the CSV to `out` and the report next to it.
pub fn write_outcome(outcome: &Outcome, out: &Path) -> Result<()> {
    let json = serde_json::to_vec_pretty(&outcome.report).map_err(|e| Error::Io(e.to_string()))?;
    match &outcome.csv {
        Some(csv) => {
            std::fs::write(out, csv)?;
            std::fs::write(report_path(out), json)?;
        }
        None => std::fs::write(out, json)?,
    }
    Ok(())
}
