use thiserror::Error;

/// Errors raised by model construction and the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} outside the Fock range 0..={max}")]
    OutOfRange { index: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("eigensolver did not converge for eigenvalue {index} within {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },
}

impl Error {
    /// True for failures of the numerical kernels, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
