use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: unsupported image format: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("{context}, line {line}: {reason}")]
    Parse {
        context: String,
        line: usize,
        reason: String,
    },

    #[error("{context}, row {row}: {reason}")]
    Validation {
        context: String,
        row: usize,
        reason: String,
    },

    #[error("scene {0} has no label record")]
    MissingLabel(u32),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("undefined repeatability: no reference regions in the common part")]
    UndefinedRepeatability,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input or settings rather than the environment.
    pub fn is_user_error(&self) -> bool {
        matches!(
            self,
            Error::Format { .. }
                | Error::Parse { .. }
                | Error::Validation { .. }
                | Error::MissingLabel(_)
                | Error::Argument(_)
                | Error::Config(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
