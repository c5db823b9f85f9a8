use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("vocabulary error: {0}")]
    Vocabulary(String),

    #[error("expected a {expected} node, got {got}")]
    NodeKind { expected: &'static str, got: &'static str },

    #[error("unknown {kind} id `{id}`")]
    UnknownId { kind: &'static str, id: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("size limit exceeded: {what} is {size}, cap is {cap}")]
    Size { what: &'static str, size: usize, cap: usize },

    #[error("confidence undefined: need at least 2 candidate values, got {0}")]
    ConfidenceUndefined(usize),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("snapshot error: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
