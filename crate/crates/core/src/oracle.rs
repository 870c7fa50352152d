//! Brute-force reference: the qubit and a finite set of truncated bath
//! oscillators evolved together under the full Lindblad equation.

use crate::dephasing::{step_grid, DephasingParams};
use crate::density::{partial_trace, DensityMatrix, StateDiagnostics};
use crate::error::{Error, Result};
use crate::matrix::ops::{annihilation, number, sigma_z};
use crate::matrix::{ComplexMatrix, C64, I};
use crate::superop::LindbladModel;
use crate::tensor::{self, SparseMatrix, TensorOperator};
use crate::trajectory::{Monitor, Trajectory};
use std::f64::consts::PI;

/// Discrete bath modes `(ω_k, g_k)` with a common Fock truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct BathDiscretization {
    n_modes: usize,
    omega_max: f64,
    fock_dim: usize,
    frequencies: Vec<f64>,
    couplings: Vec<C64>,
    /// Grid spacing Δω when the modes come from a uniform grid.
    spacing: Option<f64>,
}

impl BathDiscretization {
    /// Arbitrary modes; the largest frequency is reported as `omega_max`.
    pub fn from_modes(modes: Vec<(f64, C64)>, fock_dim: usize) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::param("n_modes", "must be >= 1"));
        }
        check_fock(fock_dim)?;
        if modes.iter().any(|(w, g)| !w.is_finite() || *w < 0.0 || !g.is_finite()) {
            return Err(Error::param("modes", "frequencies must be finite and >= 0, couplings finite"));
        }
        let omega_max = modes.iter().map(|m| m.0).fold(0.0, f64::max);
        let (frequencies, couplings): (Vec<f64>, Vec<C64>) = modes.into_iter().unzip();
        Ok(Self {
            n_modes: frequencies.len(),
            omega_max,
            fock_dim,
            frequencies,
            couplings,
            spacing: None,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn couplings(&self) -> &[C64] {
        &self.couplings
    }

    pub fn spacing(&self) -> Option<f64> {
        self.spacing
    }

    pub fn modes(&self) -> impl Iterator<Item = (f64, C64)> + '_ {
        self.frequencies.iter().copied().zip(self.couplings.iter().copied())
    }

    /// `Σ_k |g_k|²`.
    pub fn total_weight(&self) -> f64 {
        self.couplings.iter().map(|g| g.norm_sqr()).sum()
    }

    /// `2π/Δω`; beyond it the discrete bath no longer mimics a continuum.
    pub fn recurrence_time(&self) -> Option<f64> {
        self.spacing.map(|dw| 2.0 * PI / dw)
    }

    pub fn with_fock_dim(&self, fock_dim: usize) -> Result<Self> {
        check_fock(fock_dim)?;
        Ok(Self {
            fock_dim,
            ..self.clone()
        })
    }

    /// `(d_S = 2, fock_dim, .., fock_dim)`.
    pub fn joint_dims(&self) -> Vec<usize> {
        std::iter::once(2)
            .chain(std::iter::repeat_n(self.fock_dim, self.n_modes))
            .collect()
    }

    /// `2 · fock_dim^N`, saturating.
    pub fn joint_dim(&self) -> usize {
        self.joint_dims()
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .unwrap_or(usize::MAX)
    }
}

fn check_fock(fock_dim: usize) -> Result<()> {
    if fock_dim < 2 {
        return Err(Error::param("fock_dim", format!("must be >= 2, got {fock_dim}")));
    }
    Ok(())
}

/// Midpoint sampling `ω_k = (k-½)Δω`, `|g_k|² = J(ω_k)Δω`, with no check on
/// how much of the spectral tail is cut off.
pub fn midpoint_bath(p: &DephasingParams, n_modes: usize, omega_max: f64, fock_dim: usize) -> Result<BathDiscretization> {
    p.validate()?;
    if n_modes == 0 {
        return Err(Error::param("n_modes", "must be >= 1"));
    }
    if !(omega_max > 0.0) || !omega_max.is_finite() {
        return Err(Error::param("omega_max", format!("must be > 0, got {omega_max}")));
    }
    check_fock(fock_dim)?;
    let dw = omega_max / n_modes as f64;
    let frequencies: Vec<f64> = (1..=n_modes).map(|k| (k as f64 - 0.5) * dw).collect();
    let couplings = frequencies
        .iter()
        .map(|&w| C64::new((p.spectral_density(w) * dw).sqrt(), 0.0))
        .collect();
    Ok(BathDiscretization {
        n_modes,
        omega_max,
        fock_dim,
        frequencies,
        couplings,
        spacing: Some(dw),
    })
}

/// [`midpoint_bath`], rejecting grids that stop below `3Ω`.
pub fn discretize_bath(p: &DephasingParams, n_modes: usize, omega_max: f64, fock_dim: usize) -> Result<BathDiscretization> {
    p.validate()?;
    if omega_max < 3.0 * p.cutoff {
        return Err(Error::param(
            "omega_max",
            format!(
                "{omega_max} is below 3Ω = {}; the e^(-ω/Ω) tail would be truncated too aggressively",
                3.0 * p.cutoff
            ),
        ));
    }
    midpoint_bath(p, n_modes, omega_max, fock_dim)
}

/// Qubit plus discretized bath with `σ_z` couplings, vacuum bath start.
#[derive(Debug, Clone)]
pub struct FullModel {
    params: DephasingParams,
    bath: BathDiscretization,
    rho_s0: DensityMatrix,
    dims: Vec<usize>,
    hamiltonian: TensorOperator,
    sparse_h: SparseMatrix,
    /// Diagonal of `σ_z ⊗ I`.
    z_diag: Vec<f64>,
}

impl FullModel {
    /// Joint dimension above which the model is not even assembled; the
    /// run-time guard is [`OracleOptions::max_dim`].
    pub const STORAGE_LIMIT: usize = 1 << 16;

    pub fn new(params: DephasingParams, bath: BathDiscretization, rho_s0: DensityMatrix) -> Result<Self> {
        params.validate()?;
        if rho_s0.dim() != 2 {
            return Err(Error::dim("FullModel", 2, rho_s0.dim()));
        }
        if bath.joint_dim() > Self::STORAGE_LIMIT {
            return Err(Error::Precondition {
                module: "oracle",
                reason: format!(
                    "joint dimension 2·{}^{} is beyond the storable limit {}",
                    bath.fock_dim(),
                    bath.n_modes(),
                    Self::STORAGE_LIMIT
                ),
            });
        }
        let dims = bath.joint_dims();
        let d = bath.fock_dim();
        let b = annihilation(d);
        let n = number(d);
        let mut h = TensorOperator::new(dims.clone());
        h.push(C64::new(params.omega0, 0.0), vec![(0, sigma_z())])?;
        for (k, (w, g)) in bath.modes().enumerate() {
            let site = k + 1;
            if w != 0.0 {
                h.push(C64::new(w, 0.0), vec![(site, n.clone())])?;
            }
            if g != C64::new(0.0, 0.0) {
                let x = &b.dagger().scale(g) + &b.scale(g.conj());
                h.push(C64::new(1.0, 0.0), vec![(0, sigma_z()), (site, x)])?;
            }
        }
        let half = bath.joint_dim() / 2;
        let z_diag = (0..2 * half).map(|i| if i < half { 1.0 } else { -1.0 }).collect();
        Ok(Self {
            params,
            bath,
            rho_s0,
            dims,
            sparse_h: h.to_sparse(),
            hamiltonian: h,
            z_diag,
        })
    }

    pub fn params(&self) -> &DephasingParams {
        &self.params
    }

    pub fn bath(&self) -> &BathDiscretization {
        &self.bath
    }

    pub fn rho_s0(&self) -> &DensityMatrix {
        &self.rho_s0
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn joint_dim(&self) -> usize {
        self.bath.joint_dim()
    }

    pub fn hamiltonian(&self) -> &TensorOperator {
        &self.hamiltonian
    }

    /// `ρ_S(0) ⊗ |0..0⟩⟨0..0|`.
    pub fn initial_state(&self) -> ComplexMatrix {
        let d = self.joint_dim();
        let stride = d / 2;
        let mut out = ComplexMatrix::zeros(d, d);
        for a in 0..2 {
            for b in 0..2 {
                out[(a * stride, b * stride)] = self.rho_s0.mat()[(a, b)];
            }
        }
        out
    }

    /// Dense joint Lindblad model, for small cross-checks.
    pub fn to_lindblad_model(&self) -> Result<LindbladModel> {
        let l = tensor::embed(&sigma_z().scale_real(self.params.lam), 0, &self.dims);
        LindbladModel::new(self.hamiltonian.to_dense(), vec![l])
    }

    /// `-i[H, ρ] + λ²(ZρZ - ρ)` with `Z = σ_z ⊗ I`.
    pub fn rhs(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.sparse_h.commutator(rho).scale(-I);
        let l2 = self.params.lam * self.params.lam;
        if l2 != 0.0 {
            let d = rho.rows();
            let (src, dst) = (rho.as_slice(), out.as_mut_slice());
            for i in 0..d {
                for j in 0..d {
                    let zz = self.z_diag[i] * self.z_diag[j];
                    dst[i * d + j] += src[i * d + j] * (l2 * (zz - 1.0));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub dt: f64,
    /// Record every `stride`-th step (the final time is always recorded).
    pub stride: usize,
    pub max_dim: usize,
    /// Joint trace drift that aborts the run.
    pub max_trace_drift: f64,
    /// Run the joint eigensolver at each output time.
    pub check_joint_positivity: bool,
}

impl OracleOptions {
    pub const MAX_DIM: usize = 2048;

    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            stride: 1,
            max_dim: Self::MAX_DIM,
            max_trace_drift: 1e-6,
            check_joint_positivity: true,
        }
    }

    pub fn with_stride(self, stride: usize) -> Self {
        Self { stride, ..self }
    }
}

pub fn evolve_full(m: &FullModel, t_max: f64, dt: f64) -> Result<Trajectory> {
    evolve_full_with(m, t_max, &OracleOptions::new(dt))
}

/// RK4 on the joint space, recording the reduced qubit state.
pub fn evolve_full_with(m: &FullModel, t_max: f64, opts: &OracleOptions) -> Result<Trajectory> {
    if opts.stride == 0 {
        return Err(Error::param("stride", "must be >= 1"));
    }
    let d = m.joint_dim();
    if d > opts.max_dim {
        return Err(Error::Precondition {
            module: "oracle",
            reason: format!("joint dimension {d} exceeds the limit {}", opts.max_dim),
        });
    }
    let (n, h) = step_grid(t_max, opts.dt)?;
    let mut rho = m.initial_state();
    let mut traj = Trajectory::new();
    let mut joint = Monitor::default();
    record(m, &mut traj, &mut joint, 0.0, &rho, opts)?;
    for step in 1..=n {
        let k1 = m.rhs(&rho);
        let k2 = m.rhs(&(&rho + &k1.scale_real(0.5 * h)));
        let k3 = m.rhs(&(&rho + &k2.scale_real(0.5 * h)));
        let k4 = m.rhs(&(&rho + &k3.scale_real(h)));
        let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_real(2.0);
        rho += &incr.scale_real(h / 6.0);
        if step.is_multiple_of(opts.stride) || step == n {
            let t = if step == n { t_max } else { step as f64 * h };
            record(m, &mut traj, &mut joint, t, &rho, opts)?;
        }
    }
    traj.joint_monitor = Some(joint);
    Ok(traj)
}

fn record(
    m: &FullModel,
    traj: &mut Trajectory,
    joint: &mut Monitor,
    t: f64,
    rho: &ComplexMatrix,
    opts: &OracleOptions,
) -> Result<()> {
    let diag = if opts.check_joint_positivity {
        StateDiagnostics::of(rho)?
    } else {
        StateDiagnostics::cheap(rho)
    };
    if !(diag.trace_error <= opts.max_trace_drift) {
        return Err(Error::Tolerance {
            module: "oracle",
            reason: format!(
                "joint trace drift {:.3e} at t = {t} exceeds {:.1e} (hermiticity {:.3e})",
                diag.trace_error, opts.max_trace_drift, diag.hermiticity
            ),
        });
    }
    joint.record(&diag);
    traj.push(t, partial_trace(rho, m.dims(), 0)?)
}

/// Entry-wise deviation between two trajectories on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub times: Vec<f64>,
    pub dim: usize,
    /// Per-entry maxima of `|a_ij - b_ij|`, row-major.
    pub max_abs: Vec<f64>,
    /// Per-entry RMS of `|a_ij - b_ij|`, row-major.
    pub rms: Vec<f64>,
    /// Largest deviation over all entries and times.
    pub max_dev: f64,
    /// `| |a_01| - |b_01| | / |b_01|` at each time (`0` where both vanish).
    pub coherence_rel: Vec<f64>,
    pub horizon: Option<f64>,
    /// Common times at or past `horizon`.
    pub beyond_horizon: Vec<f64>,
}

impl DeviationReport {
    pub fn entry_max(&self, i: usize, j: usize) -> f64 {
        self.max_abs[i * self.dim + j]
    }

    pub fn entry_rms(&self, i: usize, j: usize) -> f64 {
        self.rms[i * self.dim + j]
    }

    /// Largest relative coherence deviation over times in `[t0, t1]`.
    pub fn max_coherence_rel_in(&self, t0: f64, t1: f64) -> f64 {
        self.times
            .iter()
            .zip(&self.coherence_rel)
            .filter(|(t, _)| **t >= t0 && **t <= t1)
            .map(|(_, r)| *r)
            .fold(0.0, f64::max)
    }
}

pub fn compare(a: &Trajectory, b: &Trajectory) -> Result<DeviationReport> {
    compare_with_horizon(a, b, None)
}

pub fn compare_with_horizon(a: &Trajectory, b: &Trajectory, horizon: Option<f64>) -> Result<DeviationReport> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!("{} vs {} samples", a.len(), b.len())));
    }
    for (ta, tb) in a.times().iter().zip(b.times()) {
        if (ta - tb).abs() > 1e-12 * ta.abs().max(1.0) {
            return Err(Error::GridMismatch(format!("time {ta} vs {tb}")));
        }
    }
    let dim = a.states().first().map_or(0, |s| s.rows());
    if let (Some(sa), Some(sb)) = (a.states().first(), b.states().first()) {
        sa.require_shape(sb, "compare")?;
    }
    let mut max_abs = vec![0.0; dim * dim];
    let mut sq = vec![0.0; dim * dim];
    let mut coherence_rel = Vec::with_capacity(a.len());
    for (sa, sb) in a.states().iter().zip(b.states()) {
        for i in 0..dim {
            for j in 0..dim {
                let dev = (sa[(i, j)] - sb[(i, j)]).norm();
                let k = i * dim + j;
                max_abs[k] = f64::max(max_abs[k], dev);
                sq[k] += dev * dev;
            }
        }
        coherence_rel.push(if dim >= 2 {
            let (ca, cb) = (sa[(0, 1)].norm(), sb[(0, 1)].norm());
            if cb == 0.0 {
                if ca == 0.0 { 0.0 } else { f64::INFINITY }
            } else {
                (ca - cb).abs() / cb
            }
        } else {
            0.0
        });
    }
    let count = a.len().max(1) as f64;
    let rms = sq.iter().map(|s| (s / count).sqrt()).collect();
    let max_dev = max_abs.iter().copied().fold(0.0, f64::max);
    let beyond_horizon = horizon
        .map(|h| a.times().iter().copied().filter(|&t| t >= h).collect())
        .unwrap_or_default();
    Ok(DeviationReport {
        times: a.times().to_vec(),
        dim,
        max_abs,
        rms,
        max_dev,
        coherence_rel,
        horizon,
        beyond_horizon,
    })
}
