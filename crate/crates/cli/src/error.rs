use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error("numerical failure: {0}")]
    Numerical(#[from] weq_core::Error),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Validation(_) | CliError::Io { .. } => 1,
            CliError::Numerical(weq_core::Error::InvalidParameter { .. })
            | CliError::Numerical(weq_core::Error::DegenerateState) => 1,
            CliError::Numerical(_) => 2,
            CliError::Verification(_) => 3,
        })
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
