use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetroError {
    #[error("invalid spin quantum number: 2j = {0} must be a positive integer")]
    InvalidSpin(f64),
    #[error("full-basis dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("infeasible constraints: {0}")]
    Infeasible(String),
    #[error("no singlet subspace for N = {n}, j = {j}")]
    NoSinglet { n: usize, j: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl MetroError {
    /// True for errors caused by measured values no physical state can produce.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, MetroError::Infeasible(_))
    }
}

pub type Result<T> = std::result::Result<T, MetroError>;
