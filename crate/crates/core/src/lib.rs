//! Reduced dynamics of a continuously measured system coupled to a bath.
//!
//! A small system evolves under a Lindblad generator `𝓢` that models a
//! continuous measurement, while also coupling linearly to a bath of
//! oscillators. The [`hybrid`] engine treats the measurement exactly and the
//! bath to second order in the coupling; [`dephasing`] gives the closed-form
//! answer for a qubit measured along `σ_z` with Ohmic phase noise; [`oracle`]
//! evolves the qubit and a truncated discrete bath exactly as a reference.
//!
//! Conventions: `ħ = 1`; operators are row-major; vectorization stacks
//! columns, so `vec(AXB) = (Bᵀ ⊗ A) vec(X)`; in tensor products the system
//! factor comes first.

// Range checks are written `!(x >= lo)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dephasing;
pub mod density;
pub mod error;
pub mod expm;
pub mod hybrid;
pub mod matrix;
pub mod oracle;
pub mod projection;
pub mod quadrature;
pub mod superop;
pub mod tensor;
pub mod tolerance;
pub mod trajectory;

pub use dephasing::{DephasingParams, KernelChoice, RState};
pub use density::{partial_trace, partial_trace_bath, DensityMatrix};
pub use error::{Error, Result};
pub use hybrid::{HybridModel, InnerRule, KernelRoute, MasterOptions};
pub use matrix::{ComplexMatrix, C64};
pub use oracle::{BathDiscretization, DeviationReport, FullModel, OracleOptions};
pub use projection::ThermoProjector;
pub use superop::{FactorizedCoupling, LindbladModel, Superoperator};
pub use tolerance::Tolerances;
pub use trajectory::{Monitor, Trajectory};
