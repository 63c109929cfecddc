use thiserror::Error;

use crate::index::TfPair;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("matrix must be square with n >= 1: got n = {n} and {len} entries")]
    BadShape { n: usize, len: usize },
    #[error("matrix is not Hermitian: max |A - A*| = {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("spectrum is invalid: {0}")]
    InvalidSpectrum(String),
    #[error("negative spectral value {value} at position {position}")]
    NegativeSpectrum { position: usize, value: f64 },
    #[error("argument must be non-negative, got {0}")]
    NegativeArgument(f64),
    #[error("hook decomposition requires a piecewise-linear function")]
    NotPiecewiseLinear,
    #[error("inadmissible concave function: {0}")]
    InvalidFunction(String),
    #[error("invalid index sequence: {0}")]
    InvalidIndex(String),
    #[error("invalid dimensions: n = {n}, m = {m}")]
    InvalidDims { n: usize, m: usize },
    #[error("assembled TF pair violates i_r + j_r <= n + r: {0:?}")]
    TfViolation(Box<TfPair>),
    #[error("flag at position {position} must be C (positions before {c} belong to I_C)")]
    FlagConflict { position: usize, c: usize },
    #[error("Schatten exponent must lie in (0, 1], got {0}")]
    InvalidP(f64),
    #[error("exhaustive enumeration is limited to n <= 6, got n = {0}")]
    BudgetExceeded(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("JSON error: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
