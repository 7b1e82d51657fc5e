use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric: entry ({row},{col}) differs from its transpose")]
    NotSymmetric { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("quadratic context mismatch: sqrt({0}) vs sqrt({1})")]
    ContextMismatch(String, String),
    #[error("inconsistent linear system: equation {row} ({label}) reduces to 0 = {residual}")]
    Inconsistent {
        row: usize,
        label: String,
        residual: String,
    },
    #[error("underdetermined system: {0}")]
    Underdetermined(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown catalog code `{0}`")]
    UnknownCode(String),
    #[error("unsupported case: {0}")]
    Unsupported(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
