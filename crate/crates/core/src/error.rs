use thiserror::Error;

/// Errors produced by construction, validation, and the numeric routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("exponent must be positive, got {0}")]
    NonPositiveExponent(f64),

    #[error("exponent must lie in (0, inf], got {0}")]
    InvalidExponent(f64),

    #[error(
        "cannot parse {0:?} as an exponent (expected a decimal, a fraction like 4/3, or \"inf\")"
    )]
    ParseExponent(String),

    #[error("conjugate exponent is undefined for p = {0} < 1")]
    ConjugateUndefined(f64),

    #[error("exponent pair requires q <= p, got p = {p}, q = {q}")]
    PairOrder { p: f64, q: f64 },

    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,

    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },

    #[error(
        "invalid entry {value} at row {row}, column {col} (entries must be finite and nonnegative)"
    )]
    BadEntry { row: usize, col: usize, value: f64 },

    #[error("cannot parse token {token:?} at row {row}, column {col}")]
    ParseEntry {
        row: usize,
        col: usize,
        token: String,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("diagonal entry {row} is zero but row {row} of the matrix is not")]
    ZeroDiagonalEntry { row: usize },

    #[error("the all-zero matrix admits no factorization objective")]
    AllZeroMatrix,

    #[error("start vector must be strictly positive")]
    NonPositiveStart,

    #[error("unsupported exponent regime: {0}")]
    UnsupportedRegime(String),

    #[error("grid oracle supports at most 4 columns, got {0}")]
    OracleTooLarge(usize),

    #[error("grid oracle needs resolution >= 8, got {0}")]
    OracleResolution(usize),

    #[error("objective decreased from {previous} to {current} at iteration {iteration}")]
    MonotonicityViolation {
        iteration: usize,
        previous: f64,
        current: f64,
    },

    #[error("invalid suite configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("invalid JSON matrix: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
