use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed image: {0}")]
    Format(String),
    #[error("image of {width}x{height} exceeds the supported size")]
    Capacity { width: usize, height: usize },
    #[error("I/O failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("shape mismatch: expected {expected:?}, got {actual:?}")]
    Shape {
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("dimension {size} is incompatible with the transform (needs a multiple of {multiple})")]
    Dimension { size: usize, multiple: usize },
    #[error("infeasible budget: {0}")]
    InfeasibleBudget(String),
    #[error("value out of range: {0}")]
    Range(String),
}

pub type Result<T> = std::result::Result<T, Error>;
