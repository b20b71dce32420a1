//! Batch front end for the cluster-state simulator.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 internal error, 4 I/O error.

pub mod checks;
pub mod config;
pub mod format;
pub mod svg;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use cluster_sim_core::SimError;
use thiserror::Error;

pub use checks::{run_checks, CheckRow, CheckStatus};
pub use config::{parse_config, Fault, Format, Mode, NoiseGrid, RunConfig};
pub use sweep::{run_sweep, SweepRow, CSV_HEADER};

#[derive(Debug, Error)]
pub enum CliError {
    /// `--help` / `--version` output; not a failure.
    #[error("{0}")]
    Help(String),
    #[error("config error: {field}: {message}")]
    Config { field: String, message: String },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("internal error: {0}")]
    Internal(#[from] SimError),
    #[error("i/o error: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Help(_) => 0,
            CliError::Verification(_) => 1,
            CliError::Config { .. } => 2,
            CliError::Internal(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn execute(config: &RunConfig) -> Result<(), CliError> {
    match config.mode {
        Mode::Verify => {
            let rows = run_checks(config.n_sites, config.fault)?;
            emit(config.out.as_deref(), &checks::render(&rows, config.format))?;
            let failed: Vec<_> = rows
                .iter()
                .filter(|r| r.status == CheckStatus::Fail)
                .map(|r| r.check.as_str())
                .collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Verification(failed.join(", ")))
            }
        }
        Mode::Sweep => {
            let rows = run_sweep(config)?;
            emit(config.out.as_deref(), &sweep::render(&rows, config.format))?;
            if let Some(path) = &config.svg {
                let doc = svg::sweep_plot(&rows);
                std::fs::write(path, doc).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
            }
            Ok(())
        }
    }
}

/// Parses `args`, runs, prints diagnostics, and returns the exit code.
pub fn run<I, T>(args: I, env_seed: Option<&str>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = parse_config(args, env_seed).and_then(|c| execute(&c));
    match result {
        Ok(()) => 0,
        Err(CliError::Help(text)) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
