//! `corner-lightning`: batch experiments for fast-decreasing polynomials,
//! lightning approximants and the minimax baseline.

mod commands;
mod config;

use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use corner_lightning::lightning::Target;

use crate::config::IndexList;

pub const THREADS_ENV: &str = "CORNER_LIGHTNING_THREADS";

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or configuration; exit code 2.
    Usage(String),
    /// The experiment could not run; exit code 1.
    Runtime(String),
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<corner_lightning::Error> for CliError {
    fn from(e: corner_lightning::Error) -> Self {
        match e {
            corner_lightning::Error::InvalidParameter(_) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "corner-lightning", version, about = "Rational approximation near corner singularities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample |R_n| on the reference square and its 1/n-neighbourhood.
    FastdecCertify(FastdecArgs),
    /// Convergence sweep of lightning approximants on a sector.
    LightningSweep(SweepArgs),
    /// Discrete polynomial minimax errors by Lawson iteration.
    MinimaxSweep(MinimaxArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// INI-style `key = value` file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FastdecArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated n values, ranges `a..b` allowed.
    #[arg(long)]
    pub n: Option<IndexList>,
    /// Lattice points per side (at least 10).
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// One of zero, zsqrt, zpow03, entire-z2, zsqrt-times-exp.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Sector half-angle in radians.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub n: Option<IndexList>,
    #[arg(long)]
    pub boundary_points: Option<usize>,
    /// none or exponential.
    #[arg(long)]
    pub clustering: Option<ClusteringArg>,
    #[arg(long)]
    pub interior_r_min: Option<f64>,
    #[arg(long)]
    pub interior_r_max: Option<f64>,
    /// Radians.
    #[arg(long)]
    pub interior_half_angle: Option<f64>,
    /// Rows with smaller n are left out of the fits.
    #[arg(long)]
    pub fit_min_n: Option<usize>,
    /// Minimum R² for a fit to pass.
    #[arg(long)]
    pub r2_floor: Option<f64>,
    /// csv or json; inferred from the --out extension when omitted.
    #[arg(long)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct MinimaxArgs {
    #[command(flatten)]
    pub common: Common,
    /// pole (1/(z - a)) or poly (a degree-n polynomial per row).
    #[arg(long)]
    pub target: Option<String>,
    /// Real pole location for the pole target.
    #[arg(long)]
    pub pole: Option<f64>,
    /// circle or sector.
    #[arg(long)]
    pub domain: Option<String>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Degrees, e.g. `0..12`.
    #[arg(long)]
    pub degrees: Option<IndexList>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Relative gap between the Lawson bounds needed to certify a row.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (csv, json)")),
        }
    }
}

impl Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusteringArg {
    None,
    Exponential,
}

impl FromStr for ClusteringArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(ClusteringArg::None),
            "exponential" => Ok(ClusteringArg::Exponential),
            _ => Err(format!("unknown clustering '{s}' (none, exponential)")),
        }
    }
}

impl Display for ClusteringArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClusteringArg::None => "none",
            ClusteringArg::Exponential => "exponential",
        })
    }
}

pub fn parse_target(id: &str) -> Result<Target, CliError> {
    id.parse().map_err(|_| {
        CliError::Usage(format!(
            "unknown target '{id}' (zero, zsqrt, zpow03, entire-z2, zsqrt-times-exp)"
        ))
    })
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Runtime(e.to_string()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| match cli.command {
        Command::FastdecCertify(args) => commands::fastdec_certify(args),
        Command::LightningSweep(args) => commands::lightning_sweep(args),
        Command::MinimaxSweep(args) => commands::minimax_sweep(args),
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run with --help for usage");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
