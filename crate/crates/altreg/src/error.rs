use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad configuration or input file; `path` locates the offending field.
    #[error("invalid config at {path}: {message}")]
    Validation { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    /// A learner or oracle failed while running.
    #[error(transparent)]
    Core(#[from] altreg_core::Error),

    /// A checked inequality or oracle comparison did not hold.
    #[error("check failed: {0}")]
    Check(String),
}

impl HarnessError {
    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::Validation {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for bad input, 3 for failed runs and checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation { .. } | HarnessError::Io { .. } | HarnessError::Json(_) | HarnessError::Csv(_) => 2,
            HarnessError::Core(_) | HarnessError::Check(_) => 3,
        }
    }
}
