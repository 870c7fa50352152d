//! Projectors onto the "relevant" part of a system ⊗ bath operator.
//!
//! `P X = Tr_B{X} ⊗ ρ_B(0)` and `Q = I - P`. The reference bath state is
//! fixed at construction.

use crate::density::{trace_out_bath, DensityMatrix};
use crate::error::{Error, Result};
use crate::matrix::{kron, ComplexMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct ThermoProjector {
    bath_ref: DensityMatrix,
    sys_dim: usize,
}

impl ThermoProjector {
    pub fn new(bath_ref: DensityMatrix, sys_dim: usize) -> Result<Self> {
        if sys_dim == 0 {
            return Err(Error::param("sys_dim", "must be positive"));
        }
        Ok(Self { bath_ref, sys_dim })
    }

    pub fn bath_ref(&self) -> &DensityMatrix {
        &self.bath_ref
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn bath_dim(&self) -> usize {
        self.bath_ref.dim()
    }

    pub fn joint_dim(&self) -> usize {
        self.sys_dim * self.bath_dim()
    }

    fn check(&self, x: &ComplexMatrix, ctx: &'static str) -> Result<()> {
        let d = self.joint_dim();
        if x.rows() != d || x.cols() != d {
            return Err(Error::dim(ctx, format!("{d}x{d}"), format!("{}x{}", x.rows(), x.cols())));
        }
        Ok(())
    }

    /// `Tr_B{x}`, the system factor of `P x`.
    pub fn reduce(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check(x, "ThermoProjector::reduce")?;
        trace_out_bath(x, self.sys_dim, self.bath_dim())
    }

    /// `r ⊗ ρ_B(0)`.
    pub fn embed(&self, r: &ComplexMatrix) -> Result<ComplexMatrix> {
        if r.rows() != self.sys_dim || r.cols() != self.sys_dim {
            return Err(Error::dim("ThermoProjector::embed", self.sys_dim, r.rows()));
        }
        Ok(kron(r, self.bath_ref.mat()))
    }

    pub fn apply_p(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.embed(&self.reduce(x)?)
    }

    pub fn apply_q(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        Ok(x - &self.apply_p(x)?)
    }
}

#[allow(non_snake_case)]
pub fn apply_P(p: &ThermoProjector, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    p.apply_p(x)
}

#[allow(non_snake_case)]
pub fn apply_Q(p: &ThermoProjector, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    p.apply_q(x)
}
