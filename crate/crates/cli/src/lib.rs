//! Batch front end: configs in, JSON/CSV reports out.

pub mod config;
pub mod report;
pub mod run;
pub mod suite;

use thiserror::Error;

pub use config::{CheckKind, FieldConfig, RunConfig, SpaceConfig};
pub use report::{export, ConfigEcho, ExportFormat, Summary, VerificationReport};
pub use run::{run, run_checks, run_suite};
pub use suite::default_suite;

/// Exit status when every check passed.
pub const EXIT_OK: u8 = 0;
/// Exit status when a check failed.
pub const EXIT_CHECK_FAILED: u8 = 1;
/// Exit status for invalid input.
pub const EXIT_INVALID: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Core(#[from] grushin_hardy::Error),

    #[error("cannot write {0}: {1}")]
    Write(String, std::io::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
