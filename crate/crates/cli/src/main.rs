//! Command-line harness: data generation, training, a priori evaluation,
//! FVM simulation, run comparison, and a backpropagation check.
//!
//! Exit codes: 0 success, 2 configuration/validation error, 3 numerical
//! failure (with a structured failure record written to the output
//! directory).

mod commands;
mod config;
mod util;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or unusable inputs (exit 2).
    Validation(String),
    /// Numerical failure; a failure record has been emitted where possible
    /// (exit 3).
    Numerical(String),
}

impl CliError {
    pub fn validation(msg: String) -> Self {
        CliError::Validation(msg)
    }

    pub fn numerical(msg: String) -> Self {
        CliError::Numerical(msg)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "nnflux", about = "Riemann-solver surrogate experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample Riemann states and write train/test (and scenario) CSVs.
    GenData {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override every sampling seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train a surrogate model on a generated dataset.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the training seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate models and approximate-solver baselines against Godunov
    /// targets.
    EvalApriori {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an FVM simulation and write snapshot CSVs plus a run log.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two simulation runs cell by cell.
    Compare {
        /// Output directory of the reference run.
        run_a: PathBuf,
        /// Output directory of the other run.
        run_b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check backpropagation against central finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenData { config, out, seed } => {
            commands::gen_data::run(&config, out.as_deref(), seed)
        }
        Command::Train { config, out, seed } => {
            commands::train::run(&config, out.as_deref(), seed)
        }
        Command::EvalApriori { config, out } => commands::eval::run(&config, out.as_deref()),
        Command::Simulate { config, out } => commands::simulate::run(&config, out.as_deref()),
        Command::Compare { run_a, run_b, out } => commands::compare::run(&run_a, &run_b, &out),
        Command::Gradcheck { seed } => commands::gradcheck::run(seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            match e {
                CliError::Validation(_) => ExitCode::from(2),
                CliError::Numerical(_) => ExitCode::from(3),
            }
        }
    }
}
