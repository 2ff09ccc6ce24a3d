use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GalaError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("run diverged at step {step}: {reason}")]
    Diverged { step: u64, reason: String },

    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Parse { path: PathBuf, reason: String },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = GalaError> = std::result::Result<T, E>;

impl GalaError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        GalaError::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GalaError::Io {
            path: path.into(),
            source,
        }
    }
}
