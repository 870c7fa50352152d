//! Fixed-step RK4 for `dR/dt = [∫₀ᵗ K(t,t') dt'] R(t)`, with `R = Tr_B 𝓟α`.
//!
//! RK4 stages fall on the half-step grid `h = dt/2`, so the inner integral
//! is a quadrature over the nodes `t' = jh ≤ t` of that grid. Each node's
//! integrated kernel is built once and reused by neighbouring steps.

use super::kernel::{first_order_term_joint, memory_kernel_superop, KernelEngine, KernelRoute};
use super::HybridModel;
use crate::dephasing::step_grid;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::superop::{build_S, Superoperator};
use crate::trajectory::Trajectory;

/// Quadrature for the inner memory integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InnerRule {
    /// Global error `O(dt²)`.
    #[default]
    Trapezoid,
    /// Composite Simpson, with a 3/8 panel for odd node counts. Global
    /// error `O(dt⁴)`, matching RK4.
    Simpson,
}

impl InnerRule {
    /// Weights for `∫₀^{ih}` on nodes `0..=i`.
    fn weights(self, i: usize, h: f64) -> Vec<f64> {
        let mut w = vec![0.0; i + 1];
        match (self, i) {
            (_, 0) => {}
            (InnerRule::Trapezoid, _) | (InnerRule::Simpson, 1) => {
                for wj in w.iter_mut() {
                    *wj = h;
                }
                w[0] = 0.5 * h;
                w[i] = 0.5 * h;
            }
            (InnerRule::Simpson, _) => {
                let start = if i % 2 == 1 {
                    for (j, c) in [1.0, 3.0, 3.0, 1.0].into_iter().enumerate() {
                        w[j] += 3.0 * h / 8.0 * c;
                    }
                    3
                } else {
                    0
                };
                let mut j = start;
                while j + 2 <= i {
                    w[j] += h / 3.0;
                    w[j + 1] += 4.0 * h / 3.0;
                    w[j + 2] += h / 3.0;
                    j += 2;
                }
            }
        }
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MasterOptions {
    pub dt: f64,
    /// Record every `stride`-th step (the final time is always recorded).
    pub stride: usize,
    pub route: KernelRoute,
    pub inner: InnerRule,
    /// Largest admissible `|𝓟𝓖(t)𝓟α(0)|` on the grid.
    pub first_order_tol: f64,
    /// Largest admissible `|Tr ρ_S - 1|` at an output time.
    pub trace_tol: f64,
    /// Upper bound on `t_max` times the system dissipation rate.
    pub max_rate_time: f64,
}

impl MasterOptions {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            stride: 1,
            route: KernelRoute::Correlation,
            inner: InnerRule::Trapezoid,
            first_order_tol: 1e-8,
            trace_tol: 1e-6,
            max_rate_time: 20.0,
        }
    }

    pub fn with_stride(self, stride: usize) -> Self {
        Self { stride, ..self }
    }

    pub fn with_route(self, route: KernelRoute) -> Self {
        Self { route, ..self }
    }

    pub fn with_inner(self, inner: InnerRule) -> Self {
        Self { inner, ..self }
    }
}

pub fn integrate_master(model: &HybridModel, t_max: f64, dt: f64) -> Result<Trajectory> {
    integrate_master_with(model, t_max, &MasterOptions::new(dt))
}

pub fn integrate_master_with(model: &HybridModel, t_max: f64, opts: &MasterOptions) -> Result<Trajectory> {
    if opts.stride == 0 {
        return Err(Error::param("stride", "must be >= 1"));
    }
    let (n, dt) = step_grid(t_max, opts.dt)?;
    let rate = model.system().dissipation_rate()?;
    if rate * t_max > opts.max_rate_time {
        return Err(Error::Precondition {
            module: "hybridmaster",
            reason: format!(
                "t_max · dissipation rate = {:.3} exceeds {}; exp(-𝓢t) is too ill-conditioned",
                rate * t_max,
                opts.max_rate_time
            ),
        });
    }
    let s = build_S(model.system())?;
    let rho0 = model.sys0().mat().clone();
    let d = model.sys_dim();
    let output = |step: usize| step.is_multiple_of(opts.stride) || step == n;
    let time = |step: usize| if step == n { t_max } else { step as f64 * dt };

    let mut traj = Trajectory::new();
    if model.is_uncoupled() {
        for step in (0..=n).filter(|&k| output(k)) {
            let t = time(step);
            traj.push(t, s.exp(t)?.apply(&rho0)?)?;
        }
        return Ok(traj);
    }

    let h = 0.5 * dt;
    let mut grid = GridKernel::new(model, &s, opts.route, h, 2 * n)?;
    for i in 0..=2 * n {
        let first = grid.first_order(i)?;
        if !(first <= opts.first_order_tol) {
            return Err(Error::Precondition {
                module: "hybridmaster",
                reason: format!(
                    "first-order term |𝓟𝓖(t)𝓟α(0)| = {first:.3e} at t = {} exceeds {:.1e}; \
                     the bath has nonzero mean coupling and the second-order equation does not apply",
                    i as f64 * h,
                    opts.first_order_tol
                ),
            });
        }
    }

    let mut r = rho0.vec_cols();
    let mut total = |i: usize| grid.integrated(i, &opts.inner.weights(i, h));
    let emit = |traj: &mut Trajectory, step: usize, r: &[C64]| -> Result<()> {
        let t = time(step);
        let rho = s.exp(t)?.apply(&ComplexMatrix::devec_cols(r, d)?)?;
        let drift = (rho.trace() - C64::new(1.0, 0.0)).norm();
        if !(drift <= opts.trace_tol) {
            return Err(Error::Tolerance {
                module: "hybridmaster",
                reason: format!(
                    "step rejected at t = {t}: trace deviation {drift:.3e} exceeds {:.1e}; reduce dt",
                    opts.trace_tol
                ),
            });
        }
        traj.push(t, rho)
    };

    emit(&mut traj, 0, &r)?;
    // The last stage of one step is the first stage of the next.
    let mut k_start = total(0)?;
    for step in 0..n {
        let k_mid = total(2 * step + 1)?;
        let k_end = total(2 * step + 2)?;
        let a1 = k_start.apply(&r);
        let a2 = k_mid.apply(&axpy(&r, 0.5 * dt, &a1));
        let a3 = k_mid.apply(&axpy(&r, 0.5 * dt, &a2));
        let a4 = k_end.apply(&axpy(&r, dt, &a3));
        for (idx, ri) in r.iter_mut().enumerate() {
            *ri += (a1[idx] + 2.0 * a2[idx] + 2.0 * a3[idx] + a4[idx]) * (dt / 6.0);
        }
        k_start = k_end;
        if output(step + 1) {
            emit(&mut traj, step + 1, &r)?;
        }
    }
    Ok(traj)
}

fn axpy(x: &[C64], a: f64, y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(xi, yi)| xi + yi * a).collect()
}

/// Kernel superoperators on the grid `t = ih`, `t' = jh`.
enum GridKernel<'a> {
    Correlation {
        engine: KernelEngine,
        h: f64,
        /// `E_{jh}`, indexed by `j`.
        forward: Vec<ComplexMatrix>,
        /// Correlations by `i - j` for a stationary bath.
        by_lag: Vec<Option<super::kernel::Correlations>>,
    },
    Joint {
        model: &'a HybridModel,
        h: f64,
    },
}

impl<'a> GridKernel<'a> {
    fn new(model: &'a HybridModel, s: &Superoperator, route: KernelRoute, h: f64, nodes: usize) -> Result<Self> {
        Ok(match route {
            KernelRoute::Correlation => {
                let mut forward = Vec::with_capacity(nodes + 1);
                for j in 0..=nodes {
                    forward.push(if j == 0 {
                        ComplexMatrix::identity(s.mat().rows())
                    } else {
                        // Fresh exponentials keep the error from compounding.
                        s.exp(j as f64 * h)?.mat().clone()
                    });
                }
                GridKernel::Correlation {
                    engine: KernelEngine::new(model)?,
                    h,
                    forward,
                    by_lag: vec![None; nodes + 1],
                }
            }
            KernelRoute::Joint => GridKernel::Joint { model, h },
        })
    }

    fn first_order(&self, i: usize) -> Result<f64> {
        match self {
            GridKernel::Correlation { engine, h, .. } => engine.first_order(i as f64 * h),
            GridKernel::Joint { model, h } => first_order_term_joint(model, i as f64 * h),
        }
    }

    /// `Σ_j w_j K(ih, jh)`.
    fn integrated(&mut self, i: usize, weights: &[f64]) -> Result<ComplexMatrix> {
        match self {
            GridKernel::Correlation {
                engine,
                h,
                forward,
                by_lag,
            } => {
                let t = i as f64 * *h;
                let n = forward[0].rows();
                let mut acc = ComplexMatrix::zeros(n, n);
                for (j, &w) in weights.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    let tp = j as f64 * *h;
                    let lag = i - j;
                    let c = if engine.is_stationary() {
                        if by_lag[lag].is_none() {
                            by_lag[lag] = Some(engine.correlations(lag as f64 * *h, 0.0));
                        }
                        by_lag[lag].clone().expect("filled above")
                    } else {
                        engine.correlations(t, tp)
                    };
                    acc += &engine.inner(&c, &forward[lag], &forward[j]).scale_real(w);
                }
                Ok(engine.generator().exp(-t)?.mat().matmul_unchecked(&acc))
            }
            GridKernel::Joint { model, h } => {
                let t = i as f64 * *h;
                let d = model.sys_dim();
                let mut acc = ComplexMatrix::zeros(d * d, d * d);
                for (j, &w) in weights.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    let k = memory_kernel_superop(model, t, j as f64 * *h, KernelRoute::Joint)?;
                    acc += &k.mat().scale_real(w);
                }
                Ok(acc)
            }
        }
    }
}
