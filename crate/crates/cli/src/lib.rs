//! Front end for symbolic verification and numeric audits of the damped
//! nonlinear wave family.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 configuration error,
//! 3 numeric blow-up (partial artifacts kept).

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod selfcheck;
pub mod svg;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::commands::Ctx;
use crate::config::Config;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "noether", version, about = "Noether currents of damped nonlinear waves: exact checks and numeric audits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Override a configuration value, e.g. `--set grid.points=256`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for randomized self-checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Verify every cataloged generator and published current family exactly.
    VerifySymbolic,
    /// Solve for the free factors that make generators variational.
    DeriveFactors,
    /// Run the solver and audit the discrete energy.
    Simulate,
    /// Run the solver and audit conserved charges.
    Charges,
    /// Compare a damped run, transformed, with the direct undamped run.
    TransformCheck,
    /// Collect the summaries in the output directory.
    Report,
}

/// Runs one invocation and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("noether: {}", e);
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        // Fails only if a pool already exists, in which case it is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    let config = match (&cli.config, cli.command) {
        (Some(p), _) => Config::load(p, &cli.overrides)?,
        (None, Command::Report) => Config::parse("[model]\nn = 1\n", &cli.overrides)?,
        (None, _) => return Err(CliError::Config("--config is required".into())),
    };
    let ctx = Ctx { config: &config, out: &cli.out, seed: cli.seed };
    let status = match cli.command {
        Command::VerifySymbolic => commands::verify_symbolic(&ctx)?,
        Command::DeriveFactors => commands::derive_factors(&ctx)?,
        Command::Simulate => commands::simulate(&ctx)?,
        Command::Charges => commands::charges(&ctx)?,
        Command::TransformCheck => commands::transform_check(&ctx)?,
        Command::Report => commands::report(&ctx)?,
    };
    eprintln!("noether: {:?}; summary in {}", status, cli.out.display());
    Ok(status.exit_code())
}
