//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (bad threshold, weight, rule syntax, ...).
    /// Raised at load/construction time, never on the scoring hot path.
    #[error("configuration error: {0}")]
    Config(String),

    /// A caller broke an operation's contract (mismatched lengths,
    /// out-of-range scorer output, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A record id was not found where one was required.
    #[error("unknown record id {0}")]
    UnknownRecord(usize),

    /// Two clusterings being compared do not cover the same item ids.
    #[error("clusterings cover different item sets: missing {missing:?}, extra {extra:?}")]
    UniverseMismatch {
        missing: Vec<usize>,
        extra: Vec<usize>,
    },

    /// Problem loading an input file (table, schema, cluster file).
    #[error("{path}: {message}")]
    Load { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn load(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Load {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
