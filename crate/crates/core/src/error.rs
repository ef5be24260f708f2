use std::path::PathBuf;

use thiserror::Error;

use crate::model::NdsState;

#[derive(Debug, Error)]
pub enum Error {
    #[error("trajectory diverged at step {step}: state ({}, {}, {}) exceeds the divergence bound", state.x, state.y, state.u)]
    Diverged { step: usize, state: NdsState },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config parse error on line {line}: {message}")]
    ConfigSyntax { line: usize, message: String },

    #[error("invalid value for `{key}`: {message}")]
    ConfigValue { key: String, message: String },

    #[error("reconstruction failed: {0}")]
    ReconstructionFailed(String),

    #[error("malformed run CSV: {0}")]
    MalformedCsv(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }

    pub(crate) fn config_value(key: &str, message: impl Into<String>) -> Self {
        Error::ConfigValue {
            key: key.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
