use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Some sweep points failed; outputs for the others were written.
    #[error("{failed} of {total} points failed")]
    PartialFailure {
        failed: usize,
        total: usize,
        code: i32,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Integration(_) => 3,
            CliError::Io { .. } => 4,
            CliError::PartialFailure { code, .. } => *code,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<qatm_core::Error> for CliError {
    fn from(e: qatm_core::Error) -> Self {
        match e {
            qatm_core::Error::Integration { .. } => CliError::Integration(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
