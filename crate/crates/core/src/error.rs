use thiserror::Error;

/// Errors raised by tensor operations, matrix kernels and the decomposition pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode {mode} out of range for an order-{order} tensor")]
    ModeOutOfRange { mode: usize, order: usize },

    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("rank {rank} out of range (must be between 1 and {max})")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("tolerance parameter f must be >= 1, got {0}")]
    InvalidTolerance(f64),

    #[error("numerically singular system: {0}")]
    Singular(String),

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
