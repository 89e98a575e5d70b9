//! Experiment runner for `hybrid-table`: replays workloads over many seeded
//! trials and writes CSV and JSON artifacts.

pub mod args;
pub mod experiment;
pub mod output;
pub mod replay;

use std::io;
use std::path::PathBuf;

use hybrid_table::workloads::ParseError;
use hybrid_table::TableError;
use thiserror::Error;

pub use args::{Cli, Command};

/// Environment variable holding the worker-pool size.
pub const WORKERS_ENV: &str = "HYBRID_TABLE_WORKERS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: line {}: {}", .source.line, .source.message)]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Table(#[from] TableError),
}

impl CliError {
    /// 2 for anything the caller got wrong, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_)
            | CliError::Parse { .. }
            | CliError::Table(TableError::Config(_)) => 2,
            CliError::Io { .. } | CliError::Table(_) => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(a) => {
            let spec = a.workload.spec()?;
            let config = a.config();
            let pool = worker_pool()?;
            let trials = pool.install(|| experiment::run_trials(&spec, &config))?;
            output::write_run(&a.out, &spec, &config, &trials)
        }
        Command::Compare(a) => {
            let spec = a.workload.spec()?;
            let pool = worker_pool()?;
            let rows =
                pool.install(|| experiment::compare(&spec, a.mode.into(), a.seed, a.trials))?;
            output::write_compare(&a.out, &spec, a.mode.into(), a.seed, a.trials, &rows)
        }
        Command::Replay(a) => {
            let dump = replay::replay_file(&a.file, a.policy.into(), a.mode.into(), a.seed)?;
            replay::write_dump(&a.out, &dump)
        }
    }
}

fn worker_pool() -> Result<rayon::ThreadPool, CliError> {
    let threads = match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("{WORKERS_ENV} must be a number, got {v:?}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))
}
