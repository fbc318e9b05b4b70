//! Crate-wide error type.

use thiserror::Error;

use crate::objects::ObjectError;

/// Errors produced anywhere in the testing pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// An object failed validation or a metric could not be evaluated.
    #[error(transparent)]
    Object(#[from] ObjectError),

    /// A metric failed on a specific pair of series elements.
    #[error("distance between observations {i} and {j}: {source}")]
    Distance {
        i: usize,
        j: usize,
        source: ObjectError,
    },

    /// The series is too short for the requested operation.
    #[error("series of length {n} is too short; need at least {min}")]
    SeriesTooShort { n: usize, min: usize },

    /// A lag outside `1..=n-4`.
    #[error("lag {k} out of range for sample size {n} (valid: 1..={max})")]
    LagOutOfRange { k: usize, n: usize, max: usize },

    /// U-centering needs a block of side at least 4.
    #[error("U-centering needs a block of side >= 4, got {m}")]
    BlockTooSmall { m: usize },

    /// The brute-force U-statistic oracle is limited to small blocks.
    #[error("oracle size guard: n-k = {m} exceeds the limit of {limit}")]
    OracleSizeGuard { m: usize, limit: usize },

    /// A configuration field failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Malformed input data.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
