//! Numeric tolerances shared by validation routines.
//!
//! Every check that decides whether a matrix is "Hermitian", "unit trace" or
//! "positive" reads its threshold from a [`Tolerances`] record. The defaults
//! are the library-wide contract; tests that probe edge cases construct a
//! modified record instead of patching constants.

/// Thresholds used by structural checks on operators and states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max-entry bound on `A - A^†` for Hermitian operators.
    pub hermitian: f64,
    /// Absolute bound on `|tr ρ - 1|`.
    pub trace: f64,
    /// Smallest admissible eigenvalue of a density matrix.
    pub min_eigenvalue: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-10,
        trace: 1e-10,
        min_eigenvalue: -1e-9,
    };

    /// Looser thresholds for states produced by long time integrations.
    pub const INTEGRATED: Tolerances = Tolerances {
        hermitian: 1e-9,
        trace: 1e-8,
        min_eigenvalue: -1e-7,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Largest joint dimension D for which generators are materialised as dense
/// D²×D² matrices.
pub const DENSE_SUPEROP_MAX_DIM: usize = 64;
