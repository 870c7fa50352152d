//! Second-order memory-kernel master equation for a Lindblad system coupled
//! to a Hamiltonian bath.
//!
//! With `𝓢` the system Lindbladian, `𝓑 = -i[H_B, ·]` and `𝓕 = -i[H_SB, ·]`,
//! the coupling in the interaction picture of `𝓢 + 𝓑` is
//!
//! ```text
//! 𝓖(t) = exp(-(𝓢+𝓑)t) 𝓕 exp((𝓢+𝓑)t)
//! ```
//!
//! For a vacuum-like bath (`𝓟𝓖𝓟 = 0`) and a factorized start, the relevant
//! part obeys, to second order and with `α(t')` replaced by `α(t)`,
//!
//! ```text
//! d/dt 𝓟α(t) = ∫₀ᵗ dt' 𝓟𝓖(t)𝓖(t')𝓟 α(t),      ρ_S(t) = exp(𝓢t) Tr_B{α(t)}
//! ```
//!
//! The bath is a product of factors, each with its own Hamiltonian and
//! initial state. A single factor is the general bipartite case; many small
//! factors describe a bath of independent modes too large to store jointly.

mod integrate;
mod kernel;

pub use integrate::{integrate_master, integrate_master_with, InnerRule, MasterOptions};
pub use kernel::{
    first_order_term_joint, first_order_term_vanishes, interaction_picture_G, memory_kernel_superop,
    memory_kernel_value, memory_kernel_value_joint, GOperator, KernelEngine, KernelRoute,
    JOINT_ROUTE_MAX_DIM,
};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::matrix::ops::{annihilation, number, sigma_z};
use crate::matrix::{kron, ComplexMatrix, ONE};
use crate::oracle::BathDiscretization;
use crate::superop::{FactorizedCoupling, LindbladModel};
use crate::tensor::TensorOperator;
use crate::dephasing::DephasingParams;

/// One tensor factor of the bath.
#[derive(Debug, Clone, PartialEq)]
pub struct BathFactor {
    hamiltonian: ComplexMatrix,
    state: DensityMatrix,
}

impl BathFactor {
    pub fn new(hamiltonian: ComplexMatrix, state: DensityMatrix) -> Result<Self> {
        let d = hamiltonian.require_square("BathFactor")?;
        if state.dim() != d {
            return Err(Error::dim("BathFactor state", d, state.dim()));
        }
        let dev = hamiltonian.hermiticity_error();
        if dev > 1e-12 * hamiltonian.max_abs().max(1.0) {
            return Err(Error::NotHermitian {
                context: "BathFactor Hamiltonian",
                deviation: dev,
            });
        }
        Ok(Self { hamiltonian, state })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.rows()
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }
}

/// A coupling term `S ⊗ B` with `B` acting on bath factor `factor`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub system: ComplexMatrix,
    pub bath: ComplexMatrix,
    pub factor: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridModel {
    system: LindbladModel,
    sys0: DensityMatrix,
    factors: Vec<BathFactor>,
    channels: Vec<Channel>,
}

impl HybridModel {
    /// Bipartite model with bath Hamiltonian `bath_h` and state `bath0`.
    pub fn new(
        system: LindbladModel,
        bath_h: ComplexMatrix,
        coupling: FactorizedCoupling,
        bath0: DensityMatrix,
        sys0: DensityMatrix,
    ) -> Result<Self> {
        if coupling.sys_dim() != system.dim() || coupling.bath_dim() != bath_h.rows() {
            return Err(Error::dim(
                "HybridModel coupling",
                format!("{}x{}", system.dim(), bath_h.rows()),
                format!("{}x{}", coupling.sys_dim(), coupling.bath_dim()),
            ));
        }
        let channels = coupling
            .pairs()
            .iter()
            .map(|(s, b)| Channel {
                system: s.clone(),
                bath: b.clone(),
                factor: 0,
            })
            .collect();
        Self::product(system, vec![BathFactor::new(bath_h, bath0)?], channels, sys0)
    }

    /// Model whose bath is the product of `factors`.
    pub fn product(
        system: LindbladModel,
        factors: Vec<BathFactor>,
        channels: Vec<Channel>,
        sys0: DensityMatrix,
    ) -> Result<Self> {
        let ds = system.dim();
        if sys0.dim() != ds {
            return Err(Error::dim("HybridModel sys0", ds, sys0.dim()));
        }
        if factors.is_empty() {
            return Err(Error::param("factors", "at least one bath factor is required"));
        }
        for c in &channels {
            let f = factors.get(c.factor).ok_or_else(|| {
                Error::param("channel", format!("factor {} out of range", c.factor))
            })?;
            if c.system.rows() != ds || c.system.cols() != ds {
                return Err(Error::dim("Channel system operator", ds, c.system.rows()));
            }
            if c.bath.rows() != f.dim() || c.bath.cols() != f.dim() {
                return Err(Error::dim("Channel bath operator", f.dim(), c.bath.rows()));
            }
        }
        // The coupling restricted to each factor must be Hermitian.
        for (fi, f) in factors.iter().enumerate() {
            let mut h = ComplexMatrix::zeros(ds * f.dim(), ds * f.dim());
            for c in channels.iter().filter(|c| c.factor == fi) {
                h += &kron(&c.system, &c.bath);
            }
            let dev = h.hermiticity_error();
            if dev > 1e-12 * h.max_abs().max(1.0) {
                return Err(Error::NotHermitian {
                    context: "HybridModel coupling",
                    deviation: dev,
                });
            }
        }
        Ok(Self {
            system,
            sys0,
            factors,
            channels,
        })
    }

    /// Qubit `ω₀σ_z` measured through `λσ_z`, coupled by `σ_z ⊗ (g b† + g* b)`
    /// to each mode of `bath` starting in its vacuum.
    pub fn dephasing(p: &DephasingParams, bath: &BathDiscretization, sys0: DensityMatrix) -> Result<Self> {
        let d = bath.fock_dim();
        let b = annihilation(d);
        let vacuum = DensityMatrix::basis(d, 0)?;
        let mut factors = Vec::with_capacity(bath.n_modes());
        let mut channels = Vec::with_capacity(bath.n_modes());
        for (k, (w, g)) in bath.modes().enumerate() {
            factors.push(BathFactor::new(number(d).scale_real(w), vacuum.clone())?);
            channels.push(Channel {
                system: sigma_z(),
                bath: &b.dagger().scale(g) + &b.scale(g.conj()),
                factor: k,
            });
        }
        Self::product(p.system_model(), factors, channels, sys0)
    }

    pub fn system(&self) -> &LindbladModel {
        &self.system
    }

    pub fn sys0(&self) -> &DensityMatrix {
        &self.sys0
    }

    pub fn factors(&self) -> &[BathFactor] {
        &self.factors
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn sys_dim(&self) -> usize {
        self.system.dim()
    }

    /// `(d_S, d_1, .., d_F)`.
    pub fn joint_dims(&self) -> Vec<usize> {
        std::iter::once(self.sys_dim())
            .chain(self.factors.iter().map(BathFactor::dim))
            .collect()
    }

    /// Product of [`Self::joint_dims`], saturating.
    pub fn joint_dim(&self) -> usize {
        self.joint_dims()
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .unwrap_or(usize::MAX)
    }

    /// True when no channel carries a nonzero operator.
    pub fn is_uncoupled(&self) -> bool {
        self.channels
            .iter()
            .all(|c| c.system.max_abs() == 0.0 || c.bath.max_abs() == 0.0)
    }

    /// `H_SB` as a sum of local products on the joint space.
    pub fn coupling_operator(&self) -> TensorOperator {
        let mut op = TensorOperator::new(self.joint_dims());
        for c in &self.channels {
            op.push(ONE, vec![(0, c.system.clone()), (c.factor + 1, c.bath.clone())])
                .expect("channels validated at construction");
        }
        op
    }

    /// `⊗_f ρ_f(0)`.
    pub fn bath_state(&self) -> ComplexMatrix {
        self.factors
            .iter()
            .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f.state().mat()))
    }

    /// `r ⊗ ρ_B(0)` on the joint space.
    pub fn embed(&self, r: &ComplexMatrix) -> ComplexMatrix {
        kron(r, &self.bath_state())
    }

    /// `max_ij |ρ_B(0)_ij|`, the product of the factor maxima.
    pub(crate) fn bath_state_max_abs(&self) -> f64 {
        self.factors.iter().map(|f| f.state().mat().max_abs()).product()
    }
}
