//! Error kinds of the command-line tool and their exit codes.

use conjugate_core::error::Error;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    /// Wraps a library error with the stage it came from.
    pub fn from_core(stage: &str, e: Error) -> Self {
        let msg = format!("{stage}: {e}");
        match e {
            Error::Invalid(_) | Error::ArityMismatch { .. } | Error::Singular(_) => CliError::Validation(msg),
            Error::Budget(_) => CliError::Budget(msg),
            Error::Internal(_) => CliError::Internal(msg),
        }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Internal(format!("{}: {e}", path.display()))
    }
}

/// `result.stage("count")?` attaches the stage name to a library error.
pub trait Stage<T> {
    fn stage(self, stage: &str) -> CliResult<T>;
}

impl<T> Stage<T> for conjugate_core::error::Result<T> {
    fn stage(self, stage: &str) -> CliResult<T> {
        self.map_err(|e| CliError::from_core(stage, e))
    }
}
