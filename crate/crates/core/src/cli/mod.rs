//! Command-line front-end: `run`, `compare`, `oracle` and `gen`.
//!
//! Exit codes: 0 success, 1 bad flags or parameters, 2 scenario or artifact
//! problems, 3 oracle instance too large, 4 oracle coverage gap.

mod commands;
mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use commands::{cmd_compare, cmd_gen, cmd_oracle, cmd_run};
pub use manifest::{Artifacts, RunManifest, MANIFEST_FILE};

use crate::moea::Algorithm;

pub const THREADS_ENV: &str = "CODNOPT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "codnopt", version, about = "Community battery scheduling on radial feeders")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimize one scenario and write front, history, SOC and stats artifacts.
    Run(RunArgs),
    /// Attainment surfaces and hypervolume comparison of run groups.
    Compare(CompareArgs),
    /// Check a front against the exhaustive grid oracle.
    Oracle(OracleArgs),
    /// Write a synthetic feeder scenario.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Nsga2,
    Spea2,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Nsga2 => Algorithm::Nsga2,
            AlgoArg::Spea2 => Algorithm::Spea2,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, value_enum)]
    pub algo: AlgoArg,
    #[arg(long, default_value_t = 100)]
    pub pop: usize,
    #[arg(long, default_value_t = 1000)]
    pub gens: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Drop every battery from the scenario before optimizing.
    #[arg(long)]
    pub no_bess: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Group directories, each holding run directories (or a single run).
    #[arg(long, num_args = 1.., required = true)]
    pub runs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub levels: usize,
    /// A front CSV, or a run directory containing front.csv.
    #[arg(long)]
    pub front: PathBuf,
    #[arg(long, default_value_t = 0.02)]
    pub eps: f64,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 118)]
    pub buses: usize,
    #[arg(long, default_value_t = 0.4)]
    pub prosumer_ratio: f64,
    #[arg(long, default_value_t = 22709.7)]
    pub peak_p: f64,
    #[arg(long, default_value_t = 17041.1)]
    pub peak_q: f64,
    #[arg(long, default_value_t = 5)]
    pub batteries: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Scenario(#[from] crate::scenario::ScenarioError),
    #[error("{0}")]
    Artifact(String),
    #[error(transparent)]
    TooLarge(crate::metrics::MetricsError),
    #[error("{0} oracle point(s) not covered")]
    CoverageGap(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Scenario(_) | CliError::Artifact(_) => 2,
            CliError::TooLarge(_) => 3,
            CliError::CoverageGap(_) => 4,
        }
    }
}

pub(crate) fn artifact_err(context: impl std::fmt::Display, e: impl std::fmt::Display) -> CliError {
    CliError::Artifact(format!("{context}: {e}"))
}

fn configure_threads() {
    let Ok(value) = std::env::var(THREADS_ENV) else { return };
    match value.trim().parse::<usize>() {
        // The global pool can only be set once per process; later calls keep it.
        Ok(n) => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Err(_) => eprintln!("warning: ignoring {THREADS_ENV}={value:?}"),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    configure_threads();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
