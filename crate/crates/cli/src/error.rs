use std::path::PathBuf;

use thiserror::Error;

/// Exit status for configuration and I/O problems.
pub const EXIT_CONFIG: u8 = 2;
/// Exit status for numeric failures and failed validation.
pub const EXIT_NUMERIC: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("numeric failure: {0}")]
    Numeric(#[from] pwshift_core::Error),
    #[error("{failed} validation check(s) failed, first: {first}")]
    ValidationFailed { failed: usize, first: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Config { .. } => EXIT_CONFIG,
            CliError::Numeric(_) | CliError::ValidationFailed { .. } => EXIT_NUMERIC,
        }
    }
}
