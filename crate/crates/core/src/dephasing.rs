//! Closed-form qubit dephasing under a σ_z measurement channel and Ohmic
//! phase noise.
//!
//! The system Hamiltonian is `ω₀σ_z`, the measurement is a single Lindblad
//! operator `λσ_z`, and each bath mode couples through
//! `σ_z ⊗ (g_k b_k^† + g_k^* b_k)` with the bath in its vacuum. Writing
//! `R(t) = exp(-𝓢t) ρ_S(t)`, the second-order equation reduces to
//!
//! ```text
//! dR₁₂/dt = -4 R₁₂ ∫₀ᵗ K(τ) dτ,      K(τ) = Σ_k |g_k|² cos(ω_k τ)
//! ```
//!
//! and for the Ohmic density `J(ω) = ηω e^{-ω/Ω}` the coherence decays as
//! `[1 + (Ωt)²]^{-2η}` on top of the measurement factor `e^{-2λ²t}`.

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::matrix::{ops::sigma_z, ComplexMatrix, C64};
use crate::oracle::BathDiscretization;
use crate::superop::LindbladModel;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingParams {
    /// `H_S = ω₀ σ_z`.
    pub omega0: f64,
    /// Measurement strength, `L = λ σ_z`.
    pub lam: f64,
    /// Dimensionless Ohmic coupling.
    pub eta: f64,
    /// Ohmic cutoff frequency Ω.
    pub cutoff: f64,
}

impl DephasingParams {
    pub fn new(omega0: f64, lam: f64, eta: f64, cutoff: f64) -> Result<Self> {
        let p = Self {
            omega0,
            lam,
            eta,
            cutoff,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.omega0.is_finite() {
            return Err(Error::param("omega0", "must be finite"));
        }
        if !self.lam.is_finite() {
            return Err(Error::param("lambda", "must be finite"));
        }
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(Error::param("eta", format!("must be >= 0, got {}", self.eta)));
        }
        if !(self.cutoff > 0.0) || !self.cutoff.is_finite() {
            return Err(Error::param("cutoff", format!("must be > 0, got {}", self.cutoff)));
        }
        Ok(())
    }

    /// `J(ω) = η ω e^{-ω/Ω}`.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        self.eta * omega * (-omega / self.cutoff).exp()
    }

    /// Measurement-only decay rate `2λ²` of the coherence.
    pub fn measurement_rate(&self) -> f64 {
        2.0 * self.lam * self.lam
    }

    /// `H_S = ω₀σ_z` with the single Lindblad `λσ_z`.
    pub fn system_model(&self) -> LindbladModel {
        LindbladModel::new(
            sigma_z().scale_real(self.omega0),
            vec![sigma_z().scale_real(self.lam)],
        )
        .expect("σ_z model is Hermitian")
    }
}

/// Entries of `R(t) = exp(-𝓢t) ρ_S(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RState {
    pub r11: C64,
    pub r12: C64,
    pub r21: C64,
    pub r22: C64,
}

impl RState {
    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(Error::dim("RState", "2x2", format!("{}x{}", m.rows(), m.cols())));
        }
        Ok(Self {
            r11: m[(0, 0)],
            r12: m[(0, 1)],
            r21: m[(1, 0)],
            r22: m[(1, 1)],
        })
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_rows(&[[self.r11, self.r12], [self.r21, self.r22]])
    }

    fn scale_offdiag(&self, f12: C64, f21: C64) -> Self {
        Self {
            r12: self.r12 * f12,
            r21: self.r21 * f21,
            ..*self
        }
    }
}

/// `exp(𝓢t) X` for the qubit generator; negative `t` gives `exp(-𝓢|t|)`.
pub fn exp_s_action(p: &DephasingParams, t: f64, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let r = RState::from_matrix(x)?;
    let damp = (-p.measurement_rate() * t).exp();
    let phase = 2.0 * p.omega0 * t;
    let f12 = C64::new(phase.cos(), -phase.sin()) * damp;
    let f21 = C64::new(phase.cos(), phase.sin()) * damp;
    Ok(r.scale_offdiag(f12, f21).to_matrix())
}

/// `∫₀ᵗ dτ ∫₀^∞ dω ω e^{-ω/Ω} cos(ωτ) = Ω²t / (1 + (Ωt)²)`.
pub fn ohmic_kernel(p: &DephasingParams, t: f64) -> f64 {
    ohmic_kernel_closed(p.cutoff, t)
}

pub fn ohmic_kernel_closed(cutoff: f64, t: f64) -> f64 {
    let x = cutoff * t;
    cutoff * cutoff * t / (1.0 + x * x)
}

/// `K(τ) = Σ_k |g_k|² cos(ω_k τ)`.
pub fn discrete_kernel(bath: &BathDiscretization, tau: f64) -> f64 {
    bath.modes()
        .map(|(w, g)| g.norm_sqr() * (w * tau).cos())
        .sum()
}

/// `∫₀ᵗ K(τ) dτ = Σ_k |g_k|² sin(ω_k t)/ω_k`.
pub fn discrete_kernel_integral(bath: &BathDiscretization, t: f64) -> f64 {
    bath.modes()
        .map(|(w, g)| {
            let s = if w == 0.0 { t } else { (w * t).sin() / w };
            g.norm_sqr() * s
        })
        .sum()
}

/// Bath-induced decay factor `[1 + (Ωt)²]^{-2η}`.
pub fn bath_decay(p: &DephasingParams, t: f64) -> f64 {
    (1.0 + (p.cutoff * t).powi(2)).powf(-2.0 * p.eta)
}

/// Closed-form `R(t)` for the continuum Ohmic bath.
pub fn evolve_r(p: &DephasingParams, r0: &RState, t: f64) -> Result<RState> {
    require_nonnegative(t)?;
    let f = C64::new(bath_decay(p, t), 0.0);
    Ok(r0.scale_offdiag(f, f))
}

/// `ρ_S(t) = exp(𝓢t) R(t)`.
pub fn rho_from_r(p: &DephasingParams, r: &RState, t: f64) -> ComplexMatrix {
    exp_s_action(p, t, &r.to_matrix()).expect("2x2 input")
}

/// Closed-form reduced state of the qubit.
pub fn analytic_rho(p: &DephasingParams, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    require_nonnegative(t)?;
    if rho0.dim() != 2 {
        return Err(Error::dim("analytic_rho", 2, rho0.dim()));
    }
    let m = rho0.mat();
    let rho11 = m[(0, 0)];
    let damp = (-p.measurement_rate() * t).exp() * bath_decay(p, t);
    let phase = 2.0 * p.omega0 * t;
    let rho12 = m[(0, 1)] * damp * C64::new(phase.cos(), -phase.sin());
    let out = ComplexMatrix::from_rows(&[
        [rho11, rho12],
        [rho12.conj(), C64::new(1.0, 0.0) - rho11],
    ]);
    Ok(DensityMatrix::from_parts_unchecked(out, vec![2]))
}

/// Closed-form trajectory sampled at `times`.
pub fn analytic_trajectory(p: &DephasingParams, rho0: &DensityMatrix, times: &[f64]) -> Result<Trajectory> {
    let mut traj = Trajectory::new();
    for &t in times {
        traj.push(t, analytic_rho(p, rho0, t)?.into_matrix())?;
    }
    Ok(traj)
}

fn require_nonnegative(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::param("t", format!("must be finite and >= 0, got {t}")))
    }
}

/// Memory kernel driving the R equation.
#[derive(Debug, Clone, Copy)]
pub enum KernelChoice<'a> {
    /// Ohmic continuum, `η Ω²t/(1+(Ωt)²)` for the integrated kernel.
    Continuous,
    /// Discrete cosine sum over the given modes.
    Discrete(&'a BathDiscretization),
    Zero,
}

impl KernelChoice<'_> {
    /// `∫₀ᵗ K(τ) dτ`.
    pub fn integrated(&self, p: &DephasingParams, t: f64) -> f64 {
        match self {
            KernelChoice::Continuous => p.eta * ohmic_kernel(p, t),
            KernelChoice::Discrete(bath) => discrete_kernel_integral(bath, t),
            KernelChoice::Zero => 0.0,
        }
    }
}

/// Uniform grid of `n` steps covering `[0, t_max]` with step at most `dt`.
pub(crate) fn step_grid(t_max: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::param("dt", format!("must be > 0, got {dt}")));
    }
    require_nonnegative(t_max)?;
    let n = (t_max / dt - 1e-9).ceil().max(0.0) as usize;
    Ok(if n == 0 { (0, dt) } else { (n, t_max / n as f64) })
}

/// Output times of the fixed-step engines: every `stride`-th node of the
/// [`step_grid`] of `[0, t_max]`, always including `0` and `t_max`.
pub fn time_grid(t_max: f64, dt: f64, stride: usize) -> Result<Vec<f64>> {
    if stride == 0 {
        return Err(Error::param("stride", "must be >= 1"));
    }
    let (n, h) = step_grid(t_max, dt)?;
    Ok((0..=n)
        .filter(|&k| k.is_multiple_of(stride) || k == n)
        .map(|k| if k == n { t_max } else { k as f64 * h })
        .collect())
}

/// RK4 integration of `dR_{12}/dt = -4 R_{12} ∫₀ᵗK`, sampled every step.
pub fn solve_r_ode(
    p: &DephasingParams,
    r0: &RState,
    t_max: f64,
    dt: f64,
    kernel: KernelChoice<'_>,
) -> Result<Vec<(f64, RState)>> {
    let (n, h) = step_grid(t_max, dt)?;
    let rate = |t: f64| -4.0 * kernel.integrated(p, t);
    let mut out = Vec::with_capacity(n + 1);
    let (mut r12, mut r21) = (r0.r12, r0.r21);
    out.push((0.0, *r0));
    for step in 0..n {
        let t = step as f64 * h;
        let (a, b, c) = (rate(t), rate(t + 0.5 * h), rate(t + h));
        // Linear scalar ODE: the RK4 update factor is shared by both entries.
        let k1 = a;
        let k2 = b * (1.0 + 0.5 * h * k1);
        let k3 = b * (1.0 + 0.5 * h * k2);
        let k4 = c * (1.0 + h * k3);
        let factor = 1.0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        r12 *= factor;
        r21 *= factor;
        let t_next = if step + 1 == n { t_max } else { (step + 1) as f64 * h };
        out.push((t_next, RState { r12, r21, ..*r0 }));
    }
    Ok(out)
}

/// Converts an R trajectory to reduced states `ρ_S(t)`.
pub fn r_series_to_trajectory(p: &DephasingParams, series: &[(f64, RState)]) -> Result<Trajectory> {
    let mut traj = Trajectory::new();
    for (t, r) in series {
        traj.push(*t, rho_from_r(p, r, *t))?;
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(omega0: f64, lam: f64, eta: f64, cutoff: f64) -> DephasingParams {
        DephasingParams::new(omega0, lam, eta, cutoff).unwrap()
    }

    fn coherence_only(x12: C64) -> ComplexMatrix {
        ComplexMatrix::from_rows(&[[C64::new(0.5, 0.0), x12], [x12.conj(), C64::new(0.5, 0.0)]])
    }

    #[test]
    fn exp_s_examples() {
        let p = params(PI / 2.0, 1.0, 0.0, 1.0);
        let x = coherence_only(C64::new(1.0, 0.0));
        assert!(exp_s_action(&p, 0.0, &x).unwrap().max_abs_diff(&x) < 1e-15);
        let out = exp_s_action(&p, 1.0, &x).unwrap();
        assert!((out[(0, 1)] - C64::new(-(-2.0_f64).exp(), 0.0)).norm() < 1e-15);
        assert!((out[(0, 1)].re + 0.1353353).abs() < 1e-7);

        let p = params(1.0, 0.0, 0.0, 1.0);
        let x = coherence_only(C64::new(0.3, 0.2));
        let out = exp_s_action(&p, PI, &x).unwrap();
        assert!(out.max_abs_diff(&x) < 1e-14);
    }

    #[test]
    fn exp_s_inverse_and_matches_generic_superoperator() {
        let p = params(0.7, 0.6, 0.0, 1.0);
        let x = ComplexMatrix::from_rows(&[
            [C64::new(0.4, 0.0), C64::new(0.1, -0.3)],
            [C64::new(0.1, 0.3), C64::new(0.6, 0.0)],
        ]);
        let fwd = exp_s_action(&p, 1.3, &x).unwrap();
        let back = exp_s_action(&p, -1.3, &fwd).unwrap();
        assert!(back.max_abs_diff(&x) < 1e-14);

        let s = crate::superop::build_S(&p.system_model()).unwrap();
        let generic = crate::superop::apply_exp(&s, 1.3, &x).unwrap();
        assert!(generic.max_abs_diff(&fwd) < 1e-13);
    }

    #[test]
    fn ohmic_kernel_values() {
        assert_eq!(ohmic_kernel(&params(1.0, 0.0, 0.1, 1.0), 0.0), 0.0);
        assert!((ohmic_kernel(&params(1.0, 0.0, 0.1, 1.0), 1.0) - 0.5).abs() < 1e-15);
        assert!((ohmic_kernel(&params(1.0, 0.0, 0.1, 2.0), 1.0) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn discrete_kernel_values() {
        let bath = BathDiscretization::from_modes(vec![(PI, C64::new(1.0, 0.0))], 2).unwrap();
        assert!((discrete_kernel(&bath, 1.0) + 1.0).abs() < 1e-15);
        assert!((discrete_kernel(&bath, 0.0) - 1.0).abs() < 1e-15);
        let bath = BathDiscretization::from_modes(
            vec![(1.0, C64::new(0.3, 0.4)), (2.0, C64::new(0.1, 0.0))],
            2,
        )
        .unwrap();
        assert!((discrete_kernel(&bath, 0.0) - 0.26).abs() < 1e-15);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn evolve_r_examples() {
        let r0 = RState {
            r11: C64::new(0.5, 0.0),
            r12: C64::new(1.0, 0.0),
            r21: C64::new(1.0, 0.0),
            r22: C64::new(0.5, 0.0),
        };
        let r = evolve_r(&params(1.0, 0.3, 0.0, 1.0), &r0, 7.0).unwrap();
        assert_eq!(r, r0);
        let r = evolve_r(&params(1.0, 0.3, 0.25, 1.0), &r0, 1.0).unwrap();
        assert!((r.r12.re - 0.5_f64.sqrt()).abs() < 1e-15);
        assert!((r.r12.re - 0.7071068).abs() < 1e-7);
        let r = evolve_r(&params(1.0, 0.3, 0.25, 1.0), &r0, 1e8).unwrap();
        assert!(r.r12.norm() < 1e-7 && r.r11 == r0.r11);
        assert!(evolve_r(&params(1.0, 0.3, 0.25, 1.0), &r0, -1.0).is_err());
    }

    #[test]
    fn analytic_rho_examples() {
        let p = params(1.0, 0.5_f64.sqrt(), 0.25, 1.0);
        let rho0 = DensityMatrix::qubit(0.5, C64::new(0.5, 0.0)).unwrap();
        assert!(analytic_rho(&p, &rho0, 0.0).unwrap().mat().max_abs_diff(rho0.mat()) < 1e-15);

        let got = analytic_rho(&p, &rho0, 1.0).unwrap().mat()[(0, 1)];
        let mag = 0.5 * (-1.0_f64).exp() * 0.5_f64.sqrt();
        let expected = C64::new(mag * 2.0_f64.cos(), -mag * 2.0_f64.sin());
        assert!((got - expected).norm() < 1e-15);
        // Exponential form of the same phase factor.
        let alt = C64::new(mag, 0.0) * C64::new(0.0, -2.0).exp();
        assert!((got - alt).norm() < 1e-15);

        let closed = params(1.0, 0.0, 0.0, 1.0);
        for t in [0.3, 2.0, 11.0] {
            let z = analytic_rho(&closed, &rho0, t).unwrap().mat()[(0, 1)];
            assert!((z.norm() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn solve_r_ode_matches_closed_form() {
        let p = params(1.0, 0.0, 0.25, 1.0);
        let r0 = RState {
            r11: C64::new(0.5, 0.0),
            r12: C64::new(0.5, 0.0),
            r21: C64::new(0.5, 0.0),
            r22: C64::new(0.5, 0.0),
        };
        let series = solve_r_ode(&p, &r0, 2.0, 1e-3, KernelChoice::Continuous).unwrap();
        let (t_end, r_end) = *series.last().unwrap();
        assert_eq!(t_end, 2.0);
        let exact = evolve_r(&p, &r0, 2.0).unwrap();
        assert!((r_end.r12 - exact.r12).norm() < 1e-6);

        let flat = solve_r_ode(&p, &r0, 2.0, 1e-2, KernelChoice::Zero).unwrap();
        assert!(flat.iter().all(|(_, r)| *r == r0));

        let single = solve_r_ode(&p, &r0, 0.0, 1e-2, KernelChoice::Continuous).unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn params_validation() {
        assert!(DephasingParams::new(1.0, 0.5, -0.1, 1.0).is_err());
        assert!(DephasingParams::new(1.0, 0.5, 0.1, 0.0).is_err());
        assert!(DephasingParams::new(f64::NAN, 0.5, 0.1, 1.0).is_err());
    }

    #[test]
    fn time_grid_keeps_endpoints() {
        assert_eq!(time_grid(0.0, 0.1, 1).unwrap(), vec![0.0]);
        let g = time_grid(1.0, 0.3, 2).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!((g[0], g[2]), (0.0, 1.0));
        assert!((g[1] - 0.5).abs() < 1e-15);
        assert!(time_grid(1.0, 0.1, 0).is_err());
    }
}
