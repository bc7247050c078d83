//! `ambient`: command-line front end for the ambient metric engine.
//!
//! Exit codes: 0 when everything passes, 1 on a mathematical mismatch and 2
//! on an input error.

mod commands;
mod config;
mod report;

use std::io::Write;
use std::process::ExitCode;

use ambient_core::expr::Mode;
use ambient_core::{Real, Q};
use clap::Parser;

use commands::{Failure, Outcome};
use config::{Cli, RunConfig};

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let cfg = RunConfig::resolve(cli.command, &cli.opts).map_err(|e| Failure::Input(e.0))?;
    let outcome = match cfg.mode {
        Mode::Exact => commands::run::<Q>(&cfg, ())?,
        Mode::Float => commands::run::<Real>(&cfg, cfg.metric.precision_bits)?,
    };
    let mut text = serde_json::to_string_pretty(&outcome.report).expect("reports serialize");
    text.push('\n');
    let written = match &cfg.out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    written.map_err(|e| Failure::Input(format!("cannot write report: {e}")))?;
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(Outcome { mismatch: None, .. }) => ExitCode::SUCCESS,
        Ok(Outcome { mismatch: Some(m), .. }) | Err(Failure::Mismatch(m)) => {
            eprintln!("ambient: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("ambient: error: {m}");
            ExitCode::from(2)
        }
    }
}
