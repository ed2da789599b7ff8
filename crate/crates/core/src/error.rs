use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("tensor of order {order} over dimension {dim} exceeds the size guard (order <= {max_order}, at most {max_entries} entries)")]
    TensorTooLarge {
        order: usize,
        dim: usize,
        max_order: usize,
        max_entries: usize,
    },

    #[error("enumeration over 2^{n} sign vectors exceeds the cap 2^{cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("matrices {i} and {j} do not commute (residual {residual:e})")]
    NonCommuting { i: usize, j: usize, residual: f64 },

    #[error("operator norm {norm} exceeds 1 beyond the contraction slack")]
    NotContractive { norm: f64 },

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("slice norm {max_slice_norm} exceeds tau*sqrt(n) = {bound}")]
    SliceNorm { max_slice_norm: f64, bound: f64 },

    #[error("solver failure: {message} (best lambda_min {lambda_min:e})")]
    SolverFailure { message: String, lambda_min: f64 },

    #[error("certificate refused: {0}")]
    Uncertified(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
