use thiserror::Error;

/// Errors produced by the library.
///
/// Validation-style variants (`InvalidParams`, `TooFewRows`, `TooLarge`,
/// `Parse`) indicate bad inputs; the remaining variants indicate numerical
/// trouble or internal misuse.
#[derive(Debug, Error)]
pub enum Error {
    /// Cholesky factorization failed: the input is not symmetric
    /// positive-definite. Usually signals gamma <= 0 or corrupted data
    /// upstream.
    #[error("matrix is not symmetric positive-definite: {0}")]
    NotSpd(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("too few rows: have {have}, need at least {need}")]
    TooFewRows { have: usize, need: usize },

    /// Support enumeration would exceed the brute-force budget.
    #[error("C({p}, {k}) exceeds the enumeration limit of {limit}")]
    TooLarge { p: usize, k: usize, limit: u64 },

    #[error("master problem called with no cuts")]
    NoCuts,

    /// The outer-approximation loop hit its cut budget before the gap
    /// closed. At desk scale this indicates a master-solver bug.
    #[error("cut budget {0} exhausted before the outer-approximation gap closed")]
    CutBudgetExceeded(usize),

    #[error("missing value for neighbor {0}")]
    MissingNeighborValue(usize),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("metadata error: {0}")]
    Meta(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by bad user input rather than internal or
    /// numerical failure. The CLI maps these to exit code 2.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::TooFewRows { .. }
                | Error::TooLarge { .. }
                | Error::Parse(_)
        )
    }
}
