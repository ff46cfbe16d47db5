use thiserror::Error;

/// Errors raised by the library. The CLI maps these onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {0} lies outside the domain")]
    OutsideDomain(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("shape mismatch: expected {expected} samples, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("cannot classify: {0}")]
    Classification(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
