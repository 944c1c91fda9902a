use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} is outside the supported range 1..=12")]
    InvalidDimension(usize),

    #[error("invalid multi-index {indices:?} for n = {n}: {reason}")]
    InvalidIndex {
        indices: Vec<usize>,
        n: usize,
        reason: &'static str,
    },

    #[error("rank {rank} out of range for degree {degree} (basis size {size})")]
    InvalidRank {
        rank: usize,
        degree: usize,
        size: usize,
    },

    #[error("invalid degree: {0}")]
    InvalidDegree(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported dimension n = {n}: {reason}")]
    UnsupportedDimension { n: usize, reason: &'static str },

    #[error("degenerate plane: spanning vectors are linearly dependent (pivot {pivot:e})")]
    DegeneratePlane { pivot: f64 },

    #[error("degree p = {p} outside the closed-formula range [2, {max}]")]
    FormulaRange { p: usize, max: isize },

    #[error("form is not symmetric (max asymmetry {0:e})")]
    Asymmetric(f64),

    #[error("first Bianchi identity violated: residual {residual:e} exceeds tolerance {tolerance:e}")]
    BianchiViolation { residual: f64, tolerance: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
