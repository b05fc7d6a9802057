//! `fockweyl` experiment runner.
//!
//! Exit codes: 0 when the verdict passes, 1 when it fails, 2 on configuration or guard errors
//! (in which case nothing is written).

mod config;
mod experiments;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ExperimentConfig;

#[derive(Debug, Parser)]
#[command(name = "fockweyl", version, about = "Runs the fockweyl numerical experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lists the experiment ids.
    List,
    /// Runs one experiment and writes CSV data plus verdict.json.
    Run {
        id: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(fockweyl::Error),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

impl From<fockweyl::Error> for CliError {
    fn from(e: fockweyl::Error) -> Self {
        CliError::Numeric(e)
    }
}

pub const DEFAULT_SEED: u64 = 7;

fn run(id: &str, config: Option<PathBuf>, out: PathBuf, seed: Option<u64>, jobs: usize) -> Result<bool, CliError> {
    let exp = experiments::find(id).ok_or_else(|| CliError::Config(format!("unknown experiment id `{id}`; see `fockweyl list`")))?;
    let cfg = match &config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(named) = &cfg.experiment {
        if named != id {
            return Err(CliError::Config(format!("config is for `{named}`, not `{id}`")));
        }
    }
    let seed = seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| (exp.run)(&cfg, seed))?;
    outcome.write(&out, id, seed)?;
    println!("{id}: {} ({})", if outcome.pass { "PASS" } else { "FAIL" }, out.join("verdict.json").display());
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for e in experiments::CATALOG {
                println!("{:<16} {}", e.id, e.summary);
            }
            ExitCode::SUCCESS
        }
        Command::Run { id, config, out, seed, jobs } => match run(&id, config, out, seed, jobs) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
