use thiserror::Error;

use crate::randomfield::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid distribution: {0}")]
    Distribution(#[from] Violation),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("field sample does not cover lattice point {0:?}")]
    Coverage(Vec<i64>),

    #[error("matrix of dimension {dim} exceeds the dense limit {limit}; use count_below")]
    Capacity { dim: usize, limit: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
