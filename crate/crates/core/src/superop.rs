//! Superoperators: linear maps on operators.
//!
//! Matrix representations use column stacking throughout,
//! `vec(A·X·B) = (Bᵀ ⊗ A)·vec(X)`, so a D-dimensional generator is a D²×D²
//! matrix. Every generator can also be applied directly through commutators
//! and products; the two routes are tested against each other.

use crate::error::{Error, Result};
use crate::expm::matexp;
use crate::matrix::{anticommutator, commutator, kron, ComplexMatrix, C64, ZERO};
use crate::tolerance::{Tolerances, DENSE_SUPEROP_MAX_DIM};

const MINUS_I: C64 = C64::new(0.0, -1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    mat: ComplexMatrix,
}

impl Superoperator {
    pub fn new(dim: usize, mat: ComplexMatrix) -> Result<Self> {
        if mat.rows() != dim * dim || mat.cols() != dim * dim {
            return Err(Error::dim(
                "Superoperator::new",
                format!("{0}x{0}", dim * dim),
                format!("{}x{}", mat.rows(), mat.cols()),
            ));
        }
        Ok(Self { dim, mat })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            mat: ComplexMatrix::zeros(dim * dim, dim * dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            mat: ComplexMatrix::identity(dim * dim),
        }
    }

    /// The superoperator `X ↦ A·X·B`.
    pub fn sandwich(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        let d = a.require_square("sandwich")?;
        a.require_shape(b, "sandwich")?;
        Ok(Self {
            dim: d,
            mat: kron(&b.transpose(), a),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim || x.cols() != self.dim {
            return Err(Error::dim(
                "Superoperator::apply",
                format!("{0}x{0}", self.dim),
                format!("{}x{}", x.rows(), x.cols()),
            ));
        }
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let v = self.mat.apply(&x.vec_cols());
        ComplexMatrix::from_fn(self.dim, self.dim, |i, j| v[i + j * self.dim])
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Superoperator) -> Result<Superoperator> {
        self.require_same(other, "compose")?;
        Ok(Self {
            dim: self.dim,
            mat: &self.mat * &other.mat,
        })
    }

    pub fn add(&self, other: &Superoperator) -> Result<Superoperator> {
        self.require_same(other, "add")?;
        Ok(Self {
            dim: self.dim,
            mat: &self.mat + &other.mat,
        })
    }

    pub fn scale(&self, s: f64) -> Superoperator {
        Self {
            dim: self.dim,
            mat: self.mat.scale_real(s),
        }
    }

    /// `exp(self · t)`.
    pub fn exp(&self, t: f64) -> Result<Superoperator> {
        Ok(Self {
            dim: self.dim,
            mat: matexp(&self.mat.scale_real(t))?,
        })
    }

    fn require_same(&self, other: &Superoperator, ctx: &'static str) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::dim(ctx, self.dim, other.dim))
        }
    }

    /// Applies this superoperator, defined on factor `site`, to an operator
    /// on the joint space `⊗ dims` (identity on the other factors).
    pub fn apply_local(&self, site: usize, dims: &[usize], x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let joint: usize = dims.iter().product();
        if site >= dims.len() || dims[site] != self.dim || x.rows() != joint || x.cols() != joint {
            return Err(Error::dim(
                "Superoperator::apply_local",
                format!("factor of dim {} inside {:?}", self.dim, dims),
                format!("site {site}, operator {}x{}", x.rows(), x.cols()),
            ));
        }
        let d = self.dim;
        let pre: usize = dims[..site].iter().product();
        let post: usize = dims[site + 1..].iter().product();
        let mut out = ComplexMatrix::zeros(joint, joint);
        let mut v = vec![ZERO; d * d];
        for p in 0..pre {
            for q in 0..post {
                for pp in 0..pre {
                    for qq in 0..post {
                        let row = |a: usize| (p * d + a) * post + q;
                        let col = |a: usize| (pp * d + a) * post + qq;
                        for a in 0..d {
                            for b in 0..d {
                                v[a + b * d] = x[(row(a), col(b))];
                            }
                        }
                        let w = self.mat.apply(&v);
                        for a in 0..d {
                            for b in 0..d {
                                out[(row(a), col(b))] = w[a + b * d];
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `X ↦ -i[h, X]`.
pub fn build_hamiltonian_superop(h: &ComplexMatrix) -> Result<Superoperator> {
    let d = h.require_square("build_hamiltonian_superop")?;
    require_hermitian(h, "build_hamiltonian_superop")?;
    let id = ComplexMatrix::identity(d);
    let mat = (&kron(&id, h) - &kron(&h.transpose(), &id)).scale(MINUS_I);
    Ok(Superoperator { dim: d, mat })
}

/// `X ↦ l X l^† - ½{l^† l, X}`.
pub fn build_dissipator(l: &ComplexMatrix) -> Result<Superoperator> {
    let d = l.require_square("build_dissipator")?;
    let id = ComplexMatrix::identity(d);
    let ldl = &l.dagger() * l;
    let jump = kron(&l.conj(), l);
    let decay = (&kron(&id, &ldl) + &kron(&ldl.transpose(), &id)).scale_real(0.5);
    Ok(Superoperator {
        dim: d,
        mat: &jump - &decay,
    })
}

/// `-i[h, X]` evaluated directly.
pub fn hamiltonian_action(h: &ComplexMatrix, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(commutator(h, x)?.scale(MINUS_I))
}

/// `l X l^† - ½{l^† l, X}` evaluated directly.
pub fn dissipator_action(l: &ComplexMatrix, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let jump = (l * x).matmul(&l.dagger())?;
    let ldl = &l.dagger() * l;
    Ok(&jump - &anticommutator(&ldl, x)?.scale_real(0.5))
}

fn require_hermitian(h: &ComplexMatrix, context: &'static str) -> Result<()> {
    let deviation = h.hermiticity_error();
    if deviation > Tolerances::DEFAULT.hermitian {
        return Err(Error::NotHermitian { context, deviation });
    }
    Ok(())
}

/// A Hamiltonian together with Lindblad operators.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladModel {
    hamiltonian: ComplexMatrix,
    lindblads: Vec<ComplexMatrix>,
}

impl LindbladModel {
    pub fn new(hamiltonian: ComplexMatrix, lindblads: Vec<ComplexMatrix>) -> Result<Self> {
        let d = hamiltonian.require_square("LindbladModel")?;
        require_hermitian(&hamiltonian, "LindbladModel hamiltonian")?;
        for l in &lindblads {
            if l.rows() != d || l.cols() != d {
                return Err(Error::dim(
                    "LindbladModel lindblad",
                    format!("{d}x{d}"),
                    format!("{}x{}", l.rows(), l.cols()),
                ));
            }
        }
        Ok(Self {
            hamiltonian,
            lindblads,
        })
    }

    /// Closed system with no dissipators.
    pub fn unitary(hamiltonian: ComplexMatrix) -> Result<Self> {
        Self::new(hamiltonian, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.rows()
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn lindblads(&self) -> &[ComplexMatrix] {
        &self.lindblads
    }

    /// Generator applied directly: `-i[H, X] + Σ_j D[L_j](X)`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut out = hamiltonian_action(&self.hamiltonian, x)?;
        for l in &self.lindblads {
            out += &dissipator_action(l, x)?;
        }
        Ok(out)
    }

    /// The same model acting on `system ⊗ bath`, operators extended by `⊗ I`.
    pub fn lift(&self, bath_dim: usize) -> LindbladModel {
        let id = ComplexMatrix::identity(bath_dim);
        LindbladModel {
            hamiltonian: kron(&self.hamiltonian, &id),
            lindblads: self.lindblads.iter().map(|l| kron(l, &id)).collect(),
        }
    }

    /// Upper bound on the decay rate `Σ_j ‖L_j‖²` of the dissipative part;
    /// `exp(-𝓢t)` can grow like `exp(rate·t)`.
    pub fn dissipation_rate(&self) -> Result<f64> {
        let mut rate = 0.0;
        for l in &self.lindblads {
            let ldl = &l.dagger() * l;
            rate += crate::matrix::eigvalsh(&ldl)?.last().copied().unwrap_or(0.0);
        }
        Ok(rate)
    }
}

/// `𝓢 = -i[H, ·] + Σ_j D[L_j]` as a dense superoperator.
#[allow(non_snake_case)]
pub fn build_S(model: &LindbladModel) -> Result<Superoperator> {
    let mut s = build_hamiltonian_superop(&model.hamiltonian)?;
    for l in &model.lindblads {
        s = s.add(&build_dissipator(l)?)?;
    }
    Ok(s)
}

/// `Σ_k S_k ⊗ B_k` interaction with system operators first.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizedCoupling {
    sys_dim: usize,
    bath_dim: usize,
    pairs: Vec<(ComplexMatrix, ComplexMatrix)>,
}

impl FactorizedCoupling {
    pub fn new(
        sys_dim: usize,
        bath_dim: usize,
        pairs: Vec<(ComplexMatrix, ComplexMatrix)>,
    ) -> Result<Self> {
        for (s, b) in &pairs {
            if s.rows() != sys_dim || s.cols() != sys_dim || b.rows() != bath_dim || b.cols() != bath_dim {
                return Err(Error::dim(
                    "FactorizedCoupling",
                    format!("({sys_dim}x{sys_dim}, {bath_dim}x{bath_dim}) pairs"),
                    format!("({}x{}, {}x{})", s.rows(), s.cols(), b.rows(), b.cols()),
                ));
            }
        }
        let coupling = Self {
            sys_dim,
            bath_dim,
            pairs,
        };
        require_hermitian(&coupling.hamiltonian(), "FactorizedCoupling")?;
        Ok(coupling)
    }

    pub fn empty(sys_dim: usize, bath_dim: usize) -> Self {
        Self {
            sys_dim,
            bath_dim,
            pairs: Vec::new(),
        }
    }

    pub fn pairs(&self) -> &[(ComplexMatrix, ComplexMatrix)] {
        &self.pairs
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn bath_dim(&self) -> usize {
        self.bath_dim
    }

    pub fn joint_dim(&self) -> usize {
        self.sys_dim * self.bath_dim
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty() || self.pairs.iter().all(|(s, b)| s.max_abs() == 0.0 || b.max_abs() == 0.0)
    }

    /// `H_SB = Σ_k S_k ⊗ B_k`.
    pub fn hamiltonian(&self) -> ComplexMatrix {
        let mut h = ComplexMatrix::zeros(self.joint_dim(), self.joint_dim());
        for (s, b) in &self.pairs {
            h += &kron(s, b);
        }
        h
    }

    /// `𝓕X = -i Σ_k [S_k ⊗ B_k, X]` evaluated directly.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.joint_dim() || x.cols() != self.joint_dim() {
            return Err(Error::dim(
                "FactorizedCoupling::apply",
                self.joint_dim(),
                format!("{}x{}", x.rows(), x.cols()),
            ));
        }
        let mut out = ComplexMatrix::zeros(x.rows(), x.cols());
        for (s, b) in &self.pairs {
            out += &hamiltonian_action(&kron(s, b), x)?;
        }
        Ok(out)
    }
}

/// `𝓕 = -i[H_SB, ·]` as a dense superoperator on the joint space.
#[allow(non_snake_case)]
pub fn build_F(coupling: &FactorizedCoupling) -> Result<Superoperator> {
    if coupling.pairs.is_empty() {
        return Ok(Superoperator::zero(coupling.joint_dim()));
    }
    build_hamiltonian_superop(&coupling.hamiltonian())
}

/// `devec(exp(t·𝓛)·vec(x))`.
pub fn apply_exp(superop: &Superoperator, t: f64, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::param("t", "must be finite"));
    }
    superop.exp(t)?.apply(x)
}

/// Largest entry of `[a, b]` on the superoperator matrices.
pub fn check_commute(a: &Superoperator, b: &Superoperator) -> Result<f64> {
    a.require_same(b, "check_commute")?;
    Ok((&(&a.mat * &b.mat) - &(&b.mat * &a.mat)).max_abs())
}

/// A generator held either as a dense matrix or applied matrix-free,
/// depending on the dimension.
#[derive(Debug, Clone)]
pub enum Generator {
    Dense(Superoperator),
    Direct(LindbladModel),
}

impl Generator {
    pub fn from_model(model: &LindbladModel) -> Result<Self> {
        if model.dim() <= DENSE_SUPEROP_MAX_DIM {
            Ok(Generator::Dense(build_S(model)?))
        } else {
            Ok(Generator::Direct(model.clone()))
        }
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        match self {
            Generator::Dense(s) => s.apply(x),
            Generator::Direct(m) => m.apply(x),
        }
    }
}
