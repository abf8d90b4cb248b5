use thiserror::Error;

/// Errors produced by the grid, operator and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid mismatch: expected L={expected}, found L={found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("domain-overflow: {0}")]
    DomainOverflow(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("unsupported symbol: {0}")]
    UnsupportedSymbol(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
