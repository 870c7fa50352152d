use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{context}: dimension mismatch (expected {expected}, found {found})")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("{context}: operator is not Hermitian (max |A - A^†| = {deviation:.3e})")]
    NotHermitian { context: &'static str, deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{module}: precondition failed: {reason}")]
    Precondition { module: &'static str, reason: String },

    #[error("{module}: tolerance exceeded: {reason}")]
    Tolerance { module: &'static str, reason: String },

    #[error("trajectory grids differ: {0}")]
    GridMismatch(String),

    #[error("eigendecomposition failed to converge")]
    Eigen,
}

impl Error {
    pub(crate) fn dim(context: &'static str, expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            context,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures raised by an engine while running (as opposed to
    /// malformed input).
    pub fn is_engine_failure(&self) -> bool {
        matches!(
            self,
            Error::Precondition { .. } | Error::Tolerance { .. } | Error::Eigen
        )
    }
}
