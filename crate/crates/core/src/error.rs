use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("motif is not connected")]
    NotConnected,

    #[error("motif has {0} nodes; at most 5 are supported")]
    SizeCap(usize),

    #[error("degenerate statistic: {0}")]
    Degenerate(String),

    #[error("cost cap exceeded: {0}")]
    CostCap(String),

    #[error("{dropped} of {total} bootstrap replicates were degenerate")]
    TooManyDegenerate { dropped: usize, total: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
