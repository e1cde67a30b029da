//! Error type shared across the pipeline.
//!
//! Each variant maps onto one of the process exit codes used by the CLI:
//! configuration problems exit 2, data problems exit 3, numeric problems
//! exit 4.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CirError {
    /// Invalid configuration: bad hyperparameter, shape mismatch in a
    /// weight spec, divisibility violation, unknown flag value.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed or inconsistent data: unreadable corpus files, missing
    /// ground truth, overlength sequences, id lookups that fail.
    #[error("data error: {0}")]
    Data(String),

    /// Numeric failure: non-finite values, degenerate inputs (zero-norm
    /// vectors, exact cancellation), divergence during training.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Tensor shape/dimension mismatch in an operation.
    #[error("dimension error: {0}")]
    Shape(String),

    /// Prompt template instantiation failure (missing or empty binding).
    #[error("template error: {0}")]
    Template(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl CirError {
    /// Process exit code for the CLI: 2 config, 3 data, 4 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            CirError::Config(_) | CirError::Template(_) => 2,
            CirError::Data(_) | CirError::Io(_) | CirError::Serde(_) => 3,
            CirError::Numeric(_) | CirError::Shape(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, CirError>;
