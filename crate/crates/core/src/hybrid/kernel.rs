//! The second-order memory kernel `𝓟𝓖(t)𝓖(t')𝓟`, evaluated two ways.
//!
//! The joint route applies `𝓖(t')` and then `𝓖(t)` to `r ⊗ ρ_B(0)` on the
//! full system-bath space and traces the bath out. The correlation route
//! uses the closed form obtained by carrying out the bath trace, with
//! `τ = t - t'` and `E_s = exp(𝓢s)`:
//!
//! ```text
//! K(t,t') r = E_{-t} Σ_{ab} ( -Γ_ab [S_a, E_τ(S_b E_{t'} r)] + Γ̃_ab [S_a, E_τ(E_{t'} r S_b)] )
//! Γ_ab  = Σ_{k∈a, k'∈b} ⟨B_k(t) B_k'(t')⟩,    Γ̃_ab = Σ_{k∈a, k'∈b} ⟨B_k'(t') B_k(t)⟩
//! ```
//!
//! where `B(t) = e^{iH_B t} B e^{-iH_B t}` and channels sharing a system
//! operator `S_a` are grouped. Only the correlation route scales to baths
//! with many factors.

use super::HybridModel;
use crate::density::partial_trace;
use crate::error::{Error, Result};
use crate::expm::unitary_propagator;
use crate::matrix::{eigh, kron, ComplexMatrix, C64, I, ZERO};
use crate::superop::{build_S, Superoperator};
use crate::tensor::{self, TensorOperator};
use crate::tolerance::DENSE_SUPEROP_MAX_DIM;

/// Largest joint dimension the joint route accepts.
pub const JOINT_ROUTE_MAX_DIM: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelRoute {
    /// Bath correlation functions; works for any number of factors.
    #[default]
    Correlation,
    /// Literal application of `𝓖(t)𝓖(t')` on the joint space.
    Joint,
}

fn require_times(t: f64, tp: f64) -> Result<()> {
    if !(tp >= 0.0 && tp <= t && t.is_finite()) {
        return Err(Error::param("t'", format!("need 0 <= t' <= t, got t = {t}, t' = {tp}")));
    }
    Ok(())
}

fn require_joint(model: &HybridModel, limit: usize, ctx: &'static str) -> Result<()> {
    let d = model.joint_dim();
    if d > limit {
        return Err(Error::Precondition {
            module: "hybridmaster",
            reason: format!("{ctx}: joint dimension {d} exceeds {limit}"),
        });
    }
    Ok(())
}

/// `exp((𝓢+𝓑)s)` on the joint space, as `exp(𝓢s)` on the system factor and
/// `U_f X U_f^†` on every bath factor.
#[derive(Debug, Clone)]
struct FreeEvolution {
    sys: Superoperator,
    bath: Vec<(ComplexMatrix, ComplexMatrix)>,
}

impl FreeEvolution {
    fn new(model: &HybridModel, s_gen: &Superoperator, s: f64) -> Result<Self> {
        let bath = model
            .factors()
            .iter()
            .map(|f| {
                let u = unitary_propagator(f.hamiltonian(), s)?;
                let ud = u.dagger();
                Ok((u, ud))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            sys: s_gen.exp(s)?,
            bath,
        })
    }

    fn apply(&self, dims: &[usize], x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut y = self.sys.apply_local(0, dims, x)?;
        for (f, (u, ud)) in self.bath.iter().enumerate() {
            y = tensor::apply_left(u, f + 1, dims, &y);
            y = tensor::apply_right(ud, f + 1, dims, &y);
        }
        Ok(y)
    }
}

/// Matrix-free `𝓖(t)` on the joint space.
#[derive(Debug, Clone)]
pub struct GOperator {
    dims: Vec<usize>,
    coupling: TensorOperator,
    forward: FreeEvolution,
    backward: FreeEvolution,
}

impl GOperator {
    pub fn new(model: &HybridModel, t: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::param("t", format!("must be finite and >= 0, got {t}")));
        }
        let s = build_S(model.system())?;
        Ok(Self {
            dims: model.joint_dims(),
            coupling: model.coupling_operator(),
            forward: FreeEvolution::new(model, &s, t)?,
            backward: FreeEvolution::new(model, &s, -t)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// `exp(-(𝓢+𝓑)t) 𝓕 exp((𝓢+𝓑)t) x`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = self.dim();
        if x.rows() != d || x.cols() != d {
            return Err(Error::dim("GOperator::apply", d, x.rows()));
        }
        let y = self.forward.apply(&self.dims, x)?;
        let y = self.coupling.commutator(&y).scale(-I);
        self.backward.apply(&self.dims, &y)
    }

    /// Dense column-stacked matrix; joint dimension at most
    /// [`DENSE_SUPEROP_MAX_DIM`].
    pub fn to_superoperator(&self) -> Result<Superoperator> {
        let d = self.dim();
        if d > DENSE_SUPEROP_MAX_DIM {
            return Err(Error::Precondition {
                module: "hybridmaster",
                reason: format!("dense 𝓖 requested for joint dimension {d} > {DENSE_SUPEROP_MAX_DIM}"),
            });
        }
        columns_to_superop(d, |p, q| self.apply(&ComplexMatrix::unit(d, p, q)))
    }
}

/// Builds the matrix whose column `p + q·d` is `vec(f(p, q))`.
fn columns_to_superop(d: usize, mut f: impl FnMut(usize, usize) -> Result<ComplexMatrix>) -> Result<Superoperator> {
    let n = d * d;
    let mut m = ComplexMatrix::zeros(n, n);
    for q in 0..d {
        for p in 0..d {
            let col = f(p, q)?.vec_cols();
            for (r, v) in col.into_iter().enumerate() {
                m[(r, p + q * d)] = v;
            }
        }
    }
    Superoperator::new(d, m)
}

/// `𝓖(t)` as a dense superoperator on the joint space.
#[allow(non_snake_case)]
pub fn interaction_picture_G(model: &HybridModel, t: f64) -> Result<Superoperator> {
    GOperator::new(model, t)?.to_superoperator()
}

/// `Tr_B{𝓖(t)𝓖(t')(r ⊗ ρ_B(0))}` by direct application on the joint space.
pub fn memory_kernel_value_joint(model: &HybridModel, t: f64, tp: f64, r: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_times(t, tp)?;
    require_joint(model, JOINT_ROUTE_MAX_DIM, "joint kernel route")?;
    let ds = model.sys_dim();
    if r.rows() != ds || r.cols() != ds {
        return Err(Error::dim("memory_kernel_value", ds, r.rows()));
    }
    let x = model.embed(r);
    let y = GOperator::new(model, tp)?.apply(&x)?;
    let z = GOperator::new(model, t)?.apply(&y)?;
    partial_trace(&z, &model.joint_dims(), 0)
}

/// `Tr_B{𝓖(t)𝓖(t')(r ⊗ ρ_B(0))}` through the bath correlation functions.
pub fn memory_kernel_value(model: &HybridModel, t: f64, tp: f64, r: &ComplexMatrix) -> Result<ComplexMatrix> {
    KernelEngine::new(model)?.apply(t, tp, r)
}

/// The kernel `r ↦ Tr_B{𝓖(t)𝓖(t')(r ⊗ ρ_B(0))}` as a system superoperator.
pub fn memory_kernel_superop(model: &HybridModel, t: f64, tp: f64, route: KernelRoute) -> Result<Superoperator> {
    require_times(t, tp)?;
    match route {
        KernelRoute::Correlation => {
            let engine = KernelEngine::new(model)?;
            Superoperator::new(model.sys_dim(), engine.superop(t, tp)?)
        }
        KernelRoute::Joint => {
            let d = model.sys_dim();
            columns_to_superop(d, |p, q| memory_kernel_value_joint(model, t, tp, &ComplexMatrix::unit(d, p, q)))
        }
    }
}

/// `max |𝓟𝓖(t)𝓟 α(0)|` via the bath means.
pub fn first_order_term_vanishes(model: &HybridModel, t: f64) -> Result<f64> {
    KernelEngine::new(model)?.first_order(t)
}

/// `max |𝓟𝓖(t)𝓟 α(0)|` by direct application on the joint space.
pub fn first_order_term_joint(model: &HybridModel, t: f64) -> Result<f64> {
    require_joint(model, JOINT_ROUTE_MAX_DIM, "joint first-order term")?;
    let alpha0 = model.embed(model.sys0().mat());
    let y = GOperator::new(model, t)?.apply(&alpha0)?;
    let reduced = partial_trace(&y, &model.joint_dims(), 0)?;
    Ok(model.embed(&reduced).max_abs())
}

/// One bath factor in the eigenbasis of its Hamiltonian.
#[derive(Debug, Clone)]
struct FactorSpectrum {
    energies: Vec<f64>,
    rho: ComplexMatrix,
    /// `(group, V^† B V)` for every channel acting on this factor.
    channels: Vec<(usize, ComplexMatrix)>,
}

impl FactorSpectrum {
    /// `B(t)_mn = B_mn e^{i(e_m - e_n)t}` in the eigenbasis.
    fn heisenberg(&self, b: &ComplexMatrix, t: f64) -> ComplexMatrix {
        let e = &self.energies;
        ComplexMatrix::from_fn(b.rows(), b.cols(), |m, n| {
            let z = b[(m, n)];
            if z == ZERO {
                ZERO
            } else {
                z * C64::from_polar(1.0, (e[m] - e[n]) * t)
            }
        })
    }
}

/// `Tr(a b ρ)`.
fn trace3(a: &ComplexMatrix, b: &ComplexMatrix, rho: &ComplexMatrix) -> C64 {
    let d = a.rows();
    let mut acc = ZERO;
    for m in 0..d {
        for n in 0..d {
            let amn = a[(m, n)];
            if amn == ZERO {
                continue;
            }
            for p in 0..d {
                acc += amn * b[(n, p)] * rho[(p, m)];
            }
        }
    }
    acc
}

fn trace2(a: &ComplexMatrix, rho: &ComplexMatrix) -> C64 {
    let d = a.rows();
    let mut acc = ZERO;
    for m in 0..d {
        for n in 0..d {
            acc += a[(m, n)] * rho[(n, m)];
        }
    }
    acc
}

/// Bath correlation sums for one pair of times.
#[derive(Debug, Clone)]
pub(crate) struct Correlations {
    /// `Γ_ab`, row-major `G × G`.
    gamma: Vec<C64>,
    /// `Γ̃_ab`, row-major `G × G`.
    gamma_tilde: Vec<C64>,
}

/// Correlation-route evaluator for one model.
#[derive(Debug, Clone)]
pub struct KernelEngine {
    sys_dim: usize,
    s: Superoperator,
    /// Distinct system operators `S_a`.
    groups: Vec<ComplexMatrix>,
    factors: Vec<FactorSpectrum>,
    stationary: bool,
    bath_max_abs: f64,
    sys0: ComplexMatrix,
}

impl KernelEngine {
    pub fn new(model: &HybridModel) -> Result<Self> {
        let mut groups: Vec<ComplexMatrix> = Vec::new();
        let mut group_of = Vec::with_capacity(model.channels().len());
        for c in model.channels() {
            let idx = match groups.iter().position(|g| g.max_abs_diff(&c.system) == 0.0) {
                Some(i) => i,
                None => {
                    groups.push(c.system.clone());
                    groups.len() - 1
                }
            };
            group_of.push(idx);
        }
        let mut stationary = true;
        let mut factors = Vec::with_capacity(model.factors().len());
        for (fi, f) in model.factors().iter().enumerate() {
            let (energies, v) = eigh(f.hamiltonian())?;
            let vd = v.dagger();
            let rho = vd.matmul(f.state().mat())?.matmul(&v)?;
            let scale = f.hamiltonian().max_abs().max(1.0);
            if !f.state().commutes_with(f.hamiltonian(), 1e-12 * scale) {
                stationary = false;
            }
            let channels = model
                .channels()
                .iter()
                .zip(&group_of)
                .filter(|(c, _)| c.factor == fi)
                .map(|(c, &g)| Ok((g, vd.matmul(&c.bath)?.matmul(&v)?)))
                .collect::<Result<_>>()?;
            factors.push(FactorSpectrum {
                energies,
                rho,
                channels,
            });
        }
        Ok(Self {
            sys_dim: model.sys_dim(),
            s: build_S(model.system())?,
            groups,
            factors,
            stationary,
            bath_max_abs: model.bath_state_max_abs(),
            sys0: model.sys0().mat().clone(),
        })
    }

    /// True when every bath factor commutes with its Hamiltonian, so the
    /// correlations depend on `t - t'` only.
    pub fn is_stationary(&self) -> bool {
        self.stationary
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    pub(crate) fn generator(&self) -> &Superoperator {
        &self.s
    }

    /// `M_a(t) = Σ_{k∈a} ⟨B_k(t)⟩`.
    pub fn means(&self, t: f64) -> Vec<C64> {
        let mut m = vec![ZERO; self.groups.len()];
        for f in &self.factors {
            for (g, b) in &f.channels {
                m[*g] += trace2(&f.heisenberg(b, t), &f.rho);
            }
        }
        m
    }

    pub(crate) fn correlations(&self, t: f64, tp: f64) -> Correlations {
        let g = self.groups.len();
        let mut gamma = vec![ZERO; g * g];
        let mut gamma_tilde = vec![ZERO; g * g];
        let mut mean_t = vec![ZERO; g];
        let mut mean_tp = vec![ZERO; g];
        for f in &self.factors {
            let at: Vec<(usize, ComplexMatrix, C64)> = f
                .channels
                .iter()
                .map(|(a, b)| {
                    let bt = f.heisenberg(b, t);
                    let m = trace2(&bt, &f.rho);
                    (*a, bt, m)
                })
                .collect();
            let atp: Vec<(usize, ComplexMatrix, C64)> = f
                .channels
                .iter()
                .map(|(a, b)| {
                    let bt = f.heisenberg(b, tp);
                    let m = trace2(&bt, &f.rho);
                    (*a, bt, m)
                })
                .collect();
            for (a, bt, mt) in &at {
                mean_t[*a] += *mt;
                for (b, btp, mtp) in &atp {
                    // Cross-factor terms factorize into means and are added below.
                    let connected = *mt * *mtp;
                    gamma[a * g + b] += trace3(bt, btp, &f.rho) - connected;
                    gamma_tilde[a * g + b] += trace3(btp, bt, &f.rho) - connected;
                }
            }
            for (b, _, mtp) in &atp {
                mean_tp[*b] += *mtp;
            }
        }
        for a in 0..g {
            for b in 0..g {
                let disconnected = mean_t[a] * mean_tp[b];
                gamma[a * g + b] += disconnected;
                gamma_tilde[a * g + b] += disconnected;
            }
        }
        Correlations { gamma, gamma_tilde }
    }

    /// `Σ_a 𝓐_a E_τ Σ_b(-Γ_ab 𝓛_b + Γ̃_ab 𝓡_b) E_{t'}` with `𝓐 = [S, ·]`,
    /// `𝓛 = S ·` and `𝓡 = · S`; the kernel is `E_{-t}` times this.
    pub(crate) fn inner(&self, c: &Correlations, e_tau: &ComplexMatrix, e_tp: &ComplexMatrix) -> ComplexMatrix {
        let d = self.sys_dim;
        let id = ComplexMatrix::identity(d);
        let g = self.groups.len();
        let left: Vec<ComplexMatrix> = self.groups.iter().map(|s| kron(&id, s)).collect();
        let right: Vec<ComplexMatrix> = self.groups.iter().map(|s| kron(&s.transpose(), &id)).collect();
        let mut acc = ComplexMatrix::zeros(d * d, d * d);
        for a in 0..g {
            let mut m = ComplexMatrix::zeros(d * d, d * d);
            for b in 0..g {
                let (gm, gt) = (c.gamma[a * g + b], c.gamma_tilde[a * g + b]);
                if gm != ZERO {
                    m -= &left[b].scale(gm);
                }
                if gt != ZERO {
                    m += &right[b].scale(gt);
                }
            }
            if m.max_abs() == 0.0 {
                continue;
            }
            let comm = &left[a] - &right[a];
            acc += &comm.matmul_unchecked(&e_tau.matmul_unchecked(&m));
        }
        acc.matmul_unchecked(e_tp)
    }

    /// Full kernel superoperator matrix at `(t, t')`.
    pub fn superop(&self, t: f64, tp: f64) -> Result<ComplexMatrix> {
        require_times(t, tp)?;
        let c = self.correlations(t, tp);
        let e_tau = self.s.exp(t - tp)?;
        let e_tp = self.s.exp(tp)?;
        let e_back = self.s.exp(-t)?;
        Ok(e_back.mat().matmul_unchecked(&self.inner(&c, e_tau.mat(), e_tp.mat())))
    }

    pub fn apply(&self, t: f64, tp: f64, r: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = self.sys_dim;
        if r.rows() != d || r.cols() != d {
            return Err(Error::dim("memory_kernel_value", d, r.rows()));
        }
        let k = Superoperator::new(d, self.superop(t, tp)?)?;
        k.apply(r)
    }

    /// `max |𝓟𝓖(t)𝓟 α(0)|`: the system factor `E_{-t}(-i Σ_a M_a(t)[S_a, E_t ρ_S(0)])`
    /// scaled by the largest entry of `ρ_B(0)`.
    pub fn first_order(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::param("t", format!("must be finite and >= 0, got {t}")));
        }
        let m = self.means(t);
        if m.iter().all(|z| *z == ZERO) {
            return Ok(0.0);
        }
        let x = self.s.exp(t)?.apply(&self.sys0)?;
        let mut y = ComplexMatrix::zeros(self.sys_dim, self.sys_dim);
        for (s, ma) in self.groups.iter().zip(&m) {
            let comm = &s.matmul_unchecked(&x) - &x.matmul_unchecked(s);
            y += &comm.scale(-I * *ma);
        }
        let z = self.s.exp(-t)?.apply(&y)?;
        Ok(z.max_abs() * self.bath_max_abs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dephasing::DephasingParams;
    use crate::density::DensityMatrix;
    use crate::hybrid::{BathFactor, Channel};
    use crate::matrix::ops::{annihilation, number, sigma_x, sigma_z};
    use crate::oracle::{discretize_bath, BathDiscretization};
    use crate::superop::{build_F, FactorizedCoupling, LindbladModel};

    fn dephasing_model(n: usize, fock: usize) -> HybridModel {
        let p = DephasingParams::new(1.0, 0.5_f64.sqrt(), 0.25, 1.0).unwrap();
        let bath = discretize_bath(&p, n, 6.0, fock).unwrap();
        let rho0 = DensityMatrix::qubit(0.5, C64::new(0.5, 0.0)).unwrap();
        HybridModel::dephasing(&p, &bath, rho0).unwrap()
    }

    fn sample_r() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            [C64::new(0.6, 0.0), C64::new(0.2, -0.1)],
            [C64::new(0.2, 0.1), C64::new(0.4, 0.0)],
        ])
    }

    #[test]
    fn g_at_zero_is_f() {
        let m = dephasing_model(1, 3);
        let g = interaction_picture_G(&m, 0.0).unwrap();
        let pairs = m
            .channels()
            .iter()
            .map(|c| (c.system.clone(), c.bath.clone()))
            .collect();
        let f = build_F(&FactorizedCoupling::new(2, 3, pairs).unwrap()).unwrap();
        assert!(g.mat().max_abs_diff(f.mat()) < 1e-13);
    }

    #[test]
    fn routes_agree_on_dephasing_model() {
        let m = dephasing_model(2, 3);
        for (t, tp) in [(0.0, 0.0), (0.7, 0.2), (1.3, 1.3), (2.0, 0.0)] {
            let a = memory_kernel_value(&m, t, tp, &sample_r()).unwrap();
            let b = memory_kernel_value_joint(&m, t, tp, &sample_r()).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12, "t={t} t'={tp}");
        }
    }

    #[test]
    fn equal_times_gives_total_weight() {
        let m = dephasing_model(3, 2);
        let w: f64 = m.channels().iter().map(|c| c.bath[(0, 1)].norm_sqr()).sum();
        for t in [0.0, 0.4, 1.5] {
            let k = memory_kernel_value(&m, t, t, &sample_r()).unwrap();
            assert!((k[(0, 1)] - sample_r()[(0, 1)] * (-4.0 * w)).norm() < 1e-13);
            assert!((k[(1, 0)] - sample_r()[(1, 0)] * (-4.0 * w)).norm() < 1e-13);
            assert!(k[(0, 0)].norm() < 1e-14 && k[(1, 1)].norm() < 1e-14);
        }
        let diag = ComplexMatrix::diag(&[C64::new(0.3, 0.0), C64::new(0.7, 0.0)]);
        assert!(memory_kernel_value(&m, 1.0, 0.3, &diag).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn discrete_cosine_kernel() {
        let p = DephasingParams::new(0.8, 0.3, 0.25, 1.0).unwrap();
        let bath = BathDiscretization::from_modes(vec![(1.3, C64::new(0.4, 0.0)), (0.5, C64::new(0.1, 0.2))], 2).unwrap();
        let rho0 = DensityMatrix::qubit(0.5, C64::new(0.5, 0.0)).unwrap();
        let m = HybridModel::dephasing(&p, &bath, rho0).unwrap();
        let (t, tp) = (1.1, 0.35);
        let k = memory_kernel_value(&m, t, tp, &sample_r()).unwrap();
        let expected = -4.0 * crate::dephasing::discrete_kernel(&bath, t - tp);
        assert!((k[(0, 1)] - sample_r()[(0, 1)] * expected).norm() < 1e-13);
    }

    #[test]
    fn routes_agree_on_generic_model() {
        // Non-commuting system and coupling operators, thermal-like bath.
        let sys = LindbladModel::new(
            &sigma_z().scale_real(0.7) + &sigma_x().scale_real(0.3),
            vec![annihilation(2).scale_real(0.4)],
        )
        .unwrap();
        let b = annihilation(3);
        let bath_h = number(3).scale_real(1.1);
        let bath0 = DensityMatrix::single(ComplexMatrix::diag(&[
            C64::new(0.7, 0.0),
            C64::new(0.2, 0.0),
            C64::new(0.1, 0.0),
        ]))
        .unwrap();
        let coupling = FactorizedCoupling::new(
            2,
            3,
            vec![
                (sigma_x(), &b + &b.dagger()),
                (sigma_z(), (&b.dagger() * &b).scale_real(0.5)),
            ],
        )
        .unwrap();
        let rho0 = DensityMatrix::qubit(0.3, C64::new(0.1, 0.2)).unwrap();
        let m = HybridModel::new(sys, bath_h, coupling, bath0, rho0).unwrap();
        for (t, tp) in [(0.9, 0.4), (1.5, 0.0)] {
            let a = memory_kernel_superop(&m, t, tp, KernelRoute::Correlation).unwrap();
            let b = memory_kernel_superop(&m, t, tp, KernelRoute::Joint).unwrap();
            assert!(a.mat().max_abs_diff(b.mat()) < 1e-11, "t={t} t'={tp}");
        }
        let a = first_order_term_vanishes(&m, 0.8).unwrap();
        let b = first_order_term_joint(&m, 0.8).unwrap();
        assert!(a > 1e-3);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn routes_agree_on_non_stationary_product_bath() {
        let sys = LindbladModel::new(sigma_z(), vec![sigma_z().scale_real(0.2)]).unwrap();
        let b = annihilation(2);
        let plus = DensityMatrix::pure(&[C64::new(0.6, 0.0), C64::new(0.8, 0.0)], vec![2]).unwrap();
        let factors = vec![
            BathFactor::new(number(2).scale_real(0.9), plus).unwrap(),
            BathFactor::new(number(2).scale_real(1.7), DensityMatrix::basis(2, 0).unwrap()).unwrap(),
        ];
        let channels = vec![
            Channel { system: sigma_z(), bath: &b + &b.dagger(), factor: 0 },
            Channel { system: sigma_x(), bath: (&b + &b.dagger()).scale_real(0.3), factor: 1 },
            Channel { system: sigma_z(), bath: number(2).scale_real(0.2), factor: 1 },
        ];
        let rho0 = DensityMatrix::qubit(0.6, C64::new(0.3, -0.1)).unwrap();
        let m = HybridModel::product(sys, factors, channels, rho0).unwrap();
        assert!(!KernelEngine::new(&m).unwrap().is_stationary());
        for (t, tp) in [(0.6, 0.1), (1.2, 1.0)] {
            let a = memory_kernel_superop(&m, t, tp, KernelRoute::Correlation).unwrap();
            let c = memory_kernel_superop(&m, t, tp, KernelRoute::Joint).unwrap();
            assert!(a.mat().max_abs_diff(c.mat()) < 1e-11);
        }
    }

    #[test]
    fn first_order_vanishes_for_vacuum() {
        let m = dephasing_model(2, 3);
        for t in [0.0, 0.5, 2.0] {
            assert!(first_order_term_vanishes(&m, t).unwrap() <= 1e-10);
            assert!(first_order_term_joint(&m, t).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn zero_coupling_gives_zero_kernel() {
        let p = DephasingParams::new(1.0, 0.5, 0.0, 1.0).unwrap();
        let bath = discretize_bath(&p, 2, 6.0, 2).unwrap();
        let rho0 = DensityMatrix::qubit(0.5, C64::new(0.5, 0.0)).unwrap();
        let m = HybridModel::dephasing(&p, &bath, rho0).unwrap();
        assert!(m.is_uncoupled());
        assert_eq!(memory_kernel_value(&m, 1.0, 0.5, &sample_r()).unwrap().max_abs(), 0.0);
        assert_eq!(first_order_term_vanishes(&m, 1.0).unwrap(), 0.0);
        assert!(interaction_picture_G(&m, 0.7).unwrap().mat().max_abs() == 0.0);
    }

    #[test]
    fn rejects_bad_times() {
        let m = dephasing_model(1, 2);
        assert!(memory_kernel_value(&m, 0.5, 1.0, &sample_r()).is_err());
        assert!(memory_kernel_value(&m, 1.0, -0.1, &sample_r()).is_err());
        assert!(GOperator::new(&m, -1.0).is_err());
    }

    #[test]
    fn joint_route_guard() {
        let m = dephasing_model(8, 3);
        assert!(matches!(
            memory_kernel_value_joint(&m, 1.0, 0.5, &sample_r()),
            Err(Error::Precondition { .. })
        ));
        assert!(memory_kernel_value(&m, 1.0, 0.5, &sample_r()).is_ok());
    }
}
