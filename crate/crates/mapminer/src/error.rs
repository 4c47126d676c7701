//! Error type shared by all pipeline stages.

use thiserror::Error;

/// Errors produced by log ingestion, model learning, and map construction.
#[derive(Debug, Error)]
pub enum Error {
    /// The input header does not contain a column the schema requires.
    #[error("missing column `{0}` in header")]
    MissingColumn(String),

    /// A data row could not be parsed. `row` is 1-based and counts the
    /// header, so the first data row is row 2.
    #[error("row {row}: {message}")]
    MalformedRow { row: u64, message: String },

    /// The input contains no events.
    #[error("event log is empty")]
    EmptyLog,

    /// An argument violates an operation's precondition.
    #[error("{0}")]
    Domain(String),

    /// A serialized document failed validation.
    #[error("validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
