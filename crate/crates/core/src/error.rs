use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a square modulo p")]
    NotASquare(i128),
    #[error("polynomial is not Eisenstein: {0}")]
    NotEisenstein(String),
    #[error("unsupported extension: {0}")]
    UnsupportedExtension(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("re-indexing would need a carry at vertex {0}")]
    CarryRequired(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("no table entry matches {0}")]
    InconsistentTable(String),
    #[error("determinant mismatch: {0}")]
    DeterminantMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
