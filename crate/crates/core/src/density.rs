//! Density matrices and partial traces.

use crate::error::{Error, Result};
use crate::matrix::{eigvalsh, kron, ComplexMatrix, C64, ZERO};
use crate::tolerance::Tolerances;

/// A validated quantum state on a tensor-product space.
///
/// `dims` lists the subsystem dimensions, system first; their product is the
/// matrix dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    dims: Vec<usize>,
}

/// Structural diagnostics of a candidate state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics {
    pub hermiticity: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    pub fn of(mat: &ComplexMatrix) -> Result<Self> {
        mat.require_square("state diagnostics")?;
        Ok(Self {
            hermiticity: mat.hermiticity_error(),
            trace_error: (mat.trace() - C64::new(1.0, 0.0)).norm(),
            min_eigenvalue: eigvalsh(mat)?.first().copied().unwrap_or(0.0),
        })
    }

    /// Hermiticity and trace only; skips the eigensolver.
    pub fn cheap(mat: &ComplexMatrix) -> Self {
        Self {
            hermiticity: mat.hermiticity_error(),
            trace_error: (mat.trace() - C64::new(1.0, 0.0)).norm(),
            min_eigenvalue: f64::NAN,
        }
    }

    pub fn within(&self, tol: &Tolerances) -> bool {
        self.hermiticity <= tol.hermitian
            && self.trace_error <= tol.trace
            && (self.min_eigenvalue.is_nan() || self.min_eigenvalue >= tol.min_eigenvalue)
    }
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        Self::with_tolerances(mat, dims, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(mat: ComplexMatrix, dims: Vec<usize>, tol: &Tolerances) -> Result<Self> {
        let d = mat.require_square("DensityMatrix")?;
        check_dims(&dims, d, "DensityMatrix")?;
        if !mat.is_finite() {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let diag = StateDiagnostics::of(&mat)?;
        if diag.hermiticity > tol.hermitian {
            return Err(Error::InvalidState(format!(
                "not Hermitian (max |ρ - ρ^†| = {:.3e})",
                diag.hermiticity
            )));
        }
        if diag.trace_error > tol.trace {
            return Err(Error::InvalidState(format!(
                "trace deviates from 1 by {:.3e}",
                diag.trace_error
            )));
        }
        if diag.min_eigenvalue < tol.min_eigenvalue {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:.3e}",
                diag.min_eigenvalue
            )));
        }
        Ok(Self { mat, dims })
    }

    /// Single-subsystem state.
    pub fn single(mat: ComplexMatrix) -> Result<Self> {
        let d = mat.require_square("DensityMatrix")?;
        Self::new(mat, vec![d])
    }

    pub(crate) fn from_parts_unchecked(mat: ComplexMatrix, dims: Vec<usize>) -> Self {
        Self { mat, dims }
    }

    /// `|ψ⟩⟨ψ|` for a normalised vector.
    pub fn pure(psi: &[C64], dims: Vec<usize>) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("state vector norm² = {norm}")));
        }
        let n = psi.len();
        Self::new(ComplexMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj()), dims)
    }

    /// Basis projector `|k⟩⟨k|`.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::param("k", format!("{k} outside dimension {d}")));
        }
        Ok(Self::from_parts_unchecked(ComplexMatrix::unit(d, k, k), vec![d]))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::from_parts_unchecked(ComplexMatrix::identity(d).scale_real(1.0 / d as f64), vec![d])
    }

    /// Qubit state from its upper-triangle entries.
    pub fn qubit(rho11: f64, rho12: C64) -> Result<Self> {
        let m = ComplexMatrix::from_rows(&[
            [C64::new(rho11, 0.0), rho12],
            [rho12.conj(), C64::new(1.0 - rho11, 0.0)],
        ]);
        Self::single(m)
    }

    /// `self ⊗ other`, dims concatenated.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::from_parts_unchecked(kron(&self.mat, &other.mat), dims)
    }

    /// Product state of the given factors, in order.
    pub fn product(factors: &[DensityMatrix]) -> Result<DensityMatrix> {
        let (first, rest) = factors
            .split_first()
            .ok_or_else(|| Error::param("factors", "empty product"))?;
        Ok(rest.iter().fold(first.clone(), |acc, f| acc.tensor(f)))
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn purity(&self) -> f64 {
        purity(&self.mat)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(eigvalsh(&self.mat)?[0])
    }

    /// True when `[h, ρ] = 0` within `tol` (the state is stationary under `h`).
    pub fn commutes_with(&self, h: &ComplexMatrix, tol: f64) -> bool {
        h.same_shape(&self.mat)
            && (&(h * &self.mat) - &(&self.mat * h)).max_abs() <= tol
    }
}

/// `tr(ρ²)`, real part.
pub fn purity(mat: &ComplexMatrix) -> f64 {
    let n = mat.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (mat[(i, j)] * mat[(j, i)]).re;
        }
    }
    acc
}

fn check_dims(dims: &[usize], d: usize, context: &'static str) -> Result<()> {
    let prod: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || prod != d {
        return Err(Error::dim(
            context,
            format!("subsystem dims with product {d}"),
            format!("{dims:?}"),
        ));
    }
    Ok(())
}

/// Traces out every subsystem except `keep` from an operator on
/// `⊗_k C^{dims[k]}` (first factor most significant).
pub fn partial_trace(mat: &ComplexMatrix, dims: &[usize], keep: usize) -> Result<ComplexMatrix> {
    let d = mat.require_square("partial_trace")?;
    check_dims(dims, d, "partial_trace")?;
    if keep >= dims.len() {
        return Err(Error::param(
            "keep",
            format!("subsystem {keep} out of range for {} factors", dims.len()),
        ));
    }
    let pre: usize = dims[..keep].iter().product();
    let dk = dims[keep];
    let post: usize = dims[keep + 1..].iter().product();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for a in 0..dk {
        for b in 0..dk {
            let mut acc = ZERO;
            for p in 0..pre {
                for q in 0..post {
                    let i = (p * dk + a) * post + q;
                    let j = (p * dk + b) * post + q;
                    acc += mat[(i, j)];
                }
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// `Tr_B` on a bipartite `system ⊗ bath` operator.
pub fn trace_out_bath(mat: &ComplexMatrix, sys_dim: usize, bath_dim: usize) -> Result<ComplexMatrix> {
    partial_trace(mat, &[sys_dim, bath_dim], 0)
}

/// Reduced state on subsystem `keep`.
pub fn partial_trace_bath(rho: &DensityMatrix, keep: usize) -> Result<DensityMatrix> {
    if rho.dims.len() < 2 {
        return Err(Error::dim(
            "partial_trace_bath",
            "at least two subsystems",
            format!("{:?}", rho.dims),
        ));
    }
    let reduced = partial_trace(&rho.mat, &rho.dims, keep)?;
    let d = reduced.rows();
    Ok(DensityMatrix::from_parts_unchecked(reduced, vec![d]))
}
