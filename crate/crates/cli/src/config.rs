//! Command-line arguments and their resolution into a run configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use ambient_core::expr::{AmbiguitySpec, MetricSpec, Mode};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "ambient", version, about = "Ambient metric expansions, obstruction tensors and conformal invariants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Solve for the ambient metric and report its coefficients.
    Expand,
    /// Report the obstruction tensor (even dimension).
    Obstruction,
    /// Evaluate contraction schemas on the ambient curvature.
    Invariant,
    /// Run the self-consistency suite; exit 1 on any mismatch.
    Check,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Expand => "expand",
            Command::Obstruction => "obstruction",
            Command::Invariant => "invariant",
            Command::Check => "check",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Metric file (TOML).
    #[arg(long, global = true, env = "AMBIENT_METRIC")]
    pub metric: Option<PathBuf>,
    /// Ambiguity tensor file (TOML); A = 0 when absent.
    #[arg(long, global = true, env = "AMBIENT_AMBIGUITY")]
    pub ambiguity: Option<PathBuf>,
    /// Highest power of ρ to solve for and report.
    #[arg(long, global = true, env = "AMBIENT_RHO_ORDER")]
    pub rho_order: Option<u32>,
    /// Highest power of log|ρ| to report.
    #[arg(long, global = true, env = "AMBIENT_LOG_ORDER")]
    pub log_order: Option<usize>,
    /// Weighted jet order (x has weight 1, ρ weight 2).
    #[arg(long, global = true, env = "AMBIENT_X_ORDER")]
    pub x_order: Option<u32>,
    /// Arithmetic; overrides the metric file.
    #[arg(long, global = true, env = "AMBIENT_MODE", value_enum)]
    pub mode: Option<ModeArg>,
    /// Schema file for `invariant`; the shipped library when absent.
    #[arg(long, global = true, env = "AMBIENT_SCHEMA")]
    pub schema: Option<PathBuf>,
    /// Report destination; standard output when absent.
    #[arg(long, global = true, env = "AMBIENT_OUT")]
    pub out: Option<PathBuf>,
}

/// An input problem: exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A fully resolved run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub metric: MetricSpec,
    pub ambiguity: Option<AmbiguitySpec>,
    pub rho_order: u32,
    pub log_order: usize,
    pub x_order: u32,
    pub mode: Mode,
    pub schema: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

fn read(path: &Path, what: &str) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: cannot read {what}: {e}", path.display())))
}

fn located(path: &Path, e: ambient_core::Error) -> InputError {
    InputError(format!("{}: {e}", path.display()))
}

impl RunConfig {
    /// Reads the input files and applies the per-command defaults:
    /// `ρ_order = ⌊n/2⌋ + 2`, two log levels, and a jet order of
    /// `2ρ_order + 4` for `expand` and `n + 2` for `obstruction`. For
    /// `invariant` it is 7 at `n = 4` and `n + 2` otherwise; for `check` it
    /// is 8 at `n = 4`, `n + 2` for larger even `n` and `2ρ_order + 2` for odd
    /// `n`.
    pub fn resolve(command: Command, opts: &Options) -> Result<RunConfig, InputError> {
        let metric_path = opts.metric.clone().ok_or_else(|| InputError("--metric is required".into()))?;
        let metric = MetricSpec::from_toml(&read(&metric_path, "metric")?).map_err(|e| located(&metric_path, e))?;
        let n = metric.dim;
        let ambiguity = match &opts.ambiguity {
            Some(p) => Some(AmbiguitySpec::from_toml(&read(p, "ambiguity tensor")?, n).map_err(|e| located(p, e))?),
            None => None,
        };
        let mode = match opts.mode {
            Some(ModeArg::Exact) => Mode::Exact,
            Some(ModeArg::Float) => Mode::Float,
            None => metric.mode,
        };
        let rho_order = opts.rho_order.unwrap_or((n / 2) as u32 + 2);
        let log_order = opts.log_order.unwrap_or(2);
        let x_order = opts.x_order.unwrap_or(match command {
            Command::Expand => 2 * rho_order + 4,
            Command::Obstruction => n as u32 + 2,
            Command::Invariant if n == 4 => 7,
            Command::Invariant => n as u32 + 2,
            Command::Check if n % 2 == 1 => 2 * rho_order + 2,
            Command::Check if n == 4 => 8,
            Command::Check => n as u32 + 2,
        });
        let cfg = RunConfig {
            command,
            metric,
            ambiguity,
            rho_order,
            log_order,
            x_order,
            mode,
            schema: opts.schema.clone(),
            out: opts.out.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), InputError> {
        let n = self.metric.dim;
        let even = n % 2 == 0 && n >= 4;
        if self.ambiguity.is_some() && !even {
            return Err(InputError(format!("an ambiguity tensor needs even n ≥ 4 (got n = {n})")));
        }
        match self.command {
            Command::Expand => {
                if self.x_order < 2 * self.rho_order + 2 {
                    return Err(InputError(format!(
                        "--x-order {} is too small for --rho-order {}: need at least {}",
                        self.x_order,
                        self.rho_order,
                        2 * self.rho_order + 2
                    )));
                }
                if even && self.ambiguity.is_some() && self.rho_order < (n / 2) as u32 {
                    return Err(InputError(format!("the ambiguity tensor enters at ρ-order {}", n / 2)));
                }
            }
            Command::Obstruction => {
                if !even {
                    return Err(InputError(format!("n must be even (and at least 4) for the obstruction, got n = {n}")));
                }
                if self.x_order < n as u32 {
                    return Err(InputError(format!("--x-order must be at least n = {n} for the obstruction")));
                }
            }
            Command::Invariant => {
                if n < 3 {
                    return Err(InputError(format!("invariants need n ≥ 3, got n = {n}")));
                }
            }
            Command::Check => {
                if n < 3 {
                    return Err(InputError(format!("the check suite needs n ≥ 3, got n = {n}")));
                }
                if even && self.x_order < n as u32 + 1 {
                    return Err(InputError(format!("--x-order must be at least {} for the check suite", n + 1)));
                }
                if !even && self.x_order < 2 * self.rho_order + 2 {
                    return Err(InputError(format!(
                        "--x-order {} is too small for --rho-order {}: need at least {}",
                        self.x_order,
                        self.rho_order,
                        2 * self.rho_order + 2
                    )));
                }
            }
        }
        Ok(())
    }
}
