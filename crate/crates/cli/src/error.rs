use std::process::ExitCode;

use persuade_core::PersuasionError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("property violation: {0}")]
    Property(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub fn code(&self) -> u8 {
        match self {
            Self::Validation(_) | Self::Io { .. } => 1,
            Self::Property(_) => 2,
            Self::Numerical(_) => 3,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }
}

impl From<PersuasionError> for CliError {
    fn from(e: PersuasionError) -> Self {
        match e {
            PersuasionError::PropertyViolation(_) | PersuasionError::NotSystematic(_) => {
                Self::Property(e.to_string())
            }
            PersuasionError::Numerical(_) => Self::Numerical(e.to_string()),
            _ => Self::Validation(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Validation(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Validation(format!("csv: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
