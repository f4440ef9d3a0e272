//! `swlab`: runs experiment configs and the built-in identity suite.
//!
//! Exit status: 0 success, 1 internal error, 2 configuration error,
//! 3 tolerance, leakage or threshold failure.

mod config;
mod run;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use swlab_core::experiments::DEFAULT_SEED;
use swlab_core::Error;

#[derive(Parser)]
#[command(name = "swlab", version, about = "Stark-Wannier Bloch-picture experiments")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized checks and bootstrap resampling.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiments of a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Comma-separated experiment names; default all.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
    /// Run the identity suite at small sizes.
    Verify {
        /// Corrupt an invariant on purpose to exercise the failure path.
        #[arg(long, value_enum)]
        inject_fault: Option<verify::Fault>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Failure(String),
    Internal(String),
}

impl CliError {
    /// Errors raised while building an experiment from its config.
    pub fn from_setup(e: Error) -> Self {
        CliError::Config(e.to_string())
    }

    /// Errors raised while running.
    pub fn from_run(e: Error) -> Self {
        match e {
            Error::LeakageExceeded { .. } | Error::HermitianSymmetry { .. } => CliError::Failure(e.to_string()),
            Error::InvalidConfig(_) | Error::SiteOutOfRange { .. } | Error::Truncation { .. } | Error::Aliasing { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Internal(e.to_string()),
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Config(_) => 2,
            CliError::Failure(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Failure(m) => write!(f, "failure: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("configuration error: --threads must be >= 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("internal error: {e}");
            return ExitCode::from(1);
        }
    }
    let res = match cli.command {
        Command::Run { config, out, only } => run::run(&config, &out, &only, cli.seed),
        Command::Verify { inject_fault } => verify::verify(inject_fault, cli.seed),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
