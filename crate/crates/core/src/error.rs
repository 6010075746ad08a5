use thiserror::Error;

/// Errors produced by the library and surfaced by the command-line harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid tour: {0}")]
    InvalidTour(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("instance with n = {n} exceeds the limit of {limit} vertices for {method}")]
    TooLarge {
        n: usize,
        limit: usize,
        method: &'static str,
    },

    #[error(
        "inconsistent quanta: theta12 + theta21 = {sum} but two opposing quanta require theta12 + theta21 < 1"
    )]
    InconsistentQuanta { sum: String },

    #[error("reduced front is not a subset of the original front")]
    NotSubset,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
