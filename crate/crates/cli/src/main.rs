//! `logmean` — verification batches, convergence sweeps, coefficient
//! tables, and Monte Carlo Dirichlet solves over ball domains.
//!
//! Exit codes: 0 all checks pass, 1 check failure or runtime failure,
//! 2 invalid configuration.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod bessel;
mod config;
mod explore;
mod solve;
mod sweep;
mod verify;

pub use config::{Format, QueryPoint, RunConfig};

#[derive(Parser)]
#[command(name = "logmean", version, about = "Weighted mean-value identities: verify, sweep, sample, and solve")]
struct Cli {
    #[command(subcommand)]
    command: Option<CommandKind>,

    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum CommandKind {
    /// Run verification checks and write a report batch.
    Verify,
    /// Residual-vs-order or residual-vs-μ convergence sweep (CSV).
    Sweep,
    /// Tabulate I₀(t) and the coefficient a(t).
    Bessel,
    /// Walk-on-spheres / walk-on-balls Dirichlet solves (CSV).
    Solve,
    /// Margins of the strict inequality for |x|²+c samples. No verdict.
    #[command(name = "explore-subharmonic")]
    ExploreSubharmonic,
}

impl CommandKind {
    fn parse(name: &str) -> Option<Self> {
        match name {
            "verify" => Some(CommandKind::Verify),
            "sweep" => Some(CommandKind::Sweep),
            "bessel" => Some(CommandKind::Bessel),
            "solve" => Some(CommandKind::Solve),
            "explore-subharmonic" => Some(CommandKind::ExploreSubharmonic),
            _ => None,
        }
    }
}

/// Shared flags; every flag overrides the matching config-file value.
#[derive(Args, Debug, Clone)]
pub struct Flags {
    /// JSON config file mirroring the run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Check ids (verify: lemma,theorem1,corollary,a_monotone,mu_limit;
    /// sweep: lemma or mu_limit).
    #[arg(long, global = true, value_delimiter = ',')]
    pub check: Vec<String>,

    /// Catalog field labels; for `solve`, the boundary-data label.
    #[arg(long, global = true, value_delimiter = ',')]
    pub fields: Vec<String>,

    /// Dimensions to run (≥ 2).
    #[arg(long, global = true, value_delimiter = ',')]
    pub dims: Vec<usize>,

    /// Radial quadrature order(s); a list sweeps orders.
    #[arg(long, global = true, value_delimiter = ',')]
    pub radial_order: Vec<usize>,

    /// Angular quadrature order (default depends on dimension).
    #[arg(long, global = true)]
    pub angular_order: Option<usize>,

    /// Tolerance scale override for checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// μ value(s) for panharmonic checks and μ sweeps.
    #[arg(long, global = true, value_delimiter = ',')]
    pub mu: Vec<f64>,

    /// RNG seed for random admissible balls and Monte Carlo walks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Number of Monte Carlo walks.
    #[arg(long, global = true)]
    pub walks: Option<usize>,

    /// Boundary capture distance (default 1e-4 · domain radius).
    #[arg(long, global = true)]
    pub eps: Option<f64>,

    /// Domain radius for `solve` (default 1).
    #[arg(long, global = true)]
    pub radius: Option<f64>,

    /// Query point `x0,x1[,...]` for `solve`; repeatable.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub at: Vec<QueryPoint>,

    /// Argument grid for `bessel`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub t: Vec<f64>,

    /// Random admissible balls per (field, dimension) in `verify`.
    #[arg(long, global = true)]
    pub samples: Option<usize>,

    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

/// Failures are split by exit code: configuration problems exit 2,
/// check/runtime failures exit 1.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Failure(String),
}

impl From<logmean::Error> for CliError {
    fn from(e: logmean::Error) -> Self {
        match e {
            logmean::Error::Config(_) | logmean::Error::Domain(_) | logmean::Error::Misuse(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Failure(other.to_string()),
        }
    }
}

/// Write `text` to the configured output path, or stdout.
pub fn write_output(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Failure(format!("cannot write `{}`: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool, CliError> {
    let mut cfg = match &cli.flags.config {
        Some(path) => RunConfig::load(path).map_err(CliError::Config)?,
        None => RunConfig::default(),
    };
    cfg.merge_flags(&cli.flags);
    cfg.validate_catalog().map_err(CliError::Config)?;

    let command = cli
        .command
        .or_else(|| cfg.command.as_deref().and_then(CommandKind::parse))
        .ok_or_else(|| {
            CliError::Config("no command given (pass a subcommand or set `command` in the config file)".into())
        })?;
    if let Some(name) = &cfg.command {
        if CommandKind::parse(name).is_none() {
            return Err(CliError::Config(format!("unknown command `{name}` in config file")));
        }
    }

    match command {
        CommandKind::Verify => verify::run(&cfg),
        CommandKind::Sweep => sweep::run(&cfg),
        CommandKind::Bessel => bessel::run(&cfg),
        CommandKind::Solve => solve::run(&cfg),
        CommandKind::ExploreSubharmonic => explore::run(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
