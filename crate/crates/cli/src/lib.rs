//! Command-line driver for the `pqec` experiments.
//!
//! [`parse_config`] turns flags (and an optional TOML file underneath them)
//! into an [`ExperimentConfig`]; [`run_experiment`] computes the result table
//! and [`write_report`] persists it as CSV or JSON.

pub mod config;
pub mod report;
pub mod run;

pub use config::{parse_config, to_args, Command, ExperimentConfig, Format, Grid, Method};
pub use report::{write_report, Cell, Report};
pub use run::run_experiment;

/// Exit status for malformed invocations.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for numerical or domain errors.
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] pqec::Error),
    #[error("non-finite value in column {0}")]
    NonFinite(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn class(&self) -> &'static str {
        match self {
            CliError::Clap(_) | CliError::Usage(_) => "UsageError",
            CliError::Domain(e) => e.class(),
            CliError::NonFinite(_) => "NonFinite",
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => "IoError",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) | CliError::NonFinite(_) => EXIT_DOMAIN,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 1,
        }
    }
}
