use thiserror::Error;

/// Errors of the experiment harness.
#[derive(Debug, Error)]
pub enum BenchError {
    /// Invalid or inconsistent configuration, tagged with the offending key.
    #[error("config error in '{key}': {message}")]
    Config { key: String, message: String },
    #[error(transparent)]
    Core(#[from] sparsedepth::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl BenchError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        BenchError::Config { key: key.into(), message: message.into() }
    }

    /// Process exit code: 2 for configuration problems, 3 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config { .. } => 2,
            _ => 3,
        }
    }
}

pub type BenchResult<T> = Result<T, BenchError>;
