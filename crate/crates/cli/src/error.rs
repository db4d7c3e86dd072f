use std::path::PathBuf;

use laplace_growth::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Numeric(_) => 2,
            CliError::Verification(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidArgument(_) | CoreError::InsufficientSamples(_) => {
                CliError::Usage(e.to_string())
            }
            CoreError::LatticeExhausted { .. }
            | CoreError::Domain(_)
            | CoreError::NonConvergence { .. } => CliError::Numeric(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
