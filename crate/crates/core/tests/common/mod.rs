//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's numerics beyond constructing
//! inputs; each helper recomputes its answer from scratch.

#![allow(dead_code)]

use measnoise::{ComplexMatrix, DensityMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), eps, 40)
}

/// `∫₀ᵗ dτ ∫₀^∞ dω ω e^{-ω/Ω} cos(ωτ)`, both integrals numeric.
///
/// The frequency integral stops at `60Ω` and is split into pieces shorter
/// than half a period of `cos(ωτ)` so the adaptive rule cannot alias.
pub fn ohmic_double_integral(cutoff: f64, t: f64) -> f64 {
    let w_max = 60.0 * cutoff;
    let inner = |tau: f64| {
        let width = if tau > 0.0 { (std::f64::consts::PI / tau).min(cutoff) } else { cutoff };
        let pieces = (w_max / width).ceil() as usize;
        let h = w_max / pieces as f64;
        let g = |w: f64| w * (-w / cutoff).exp() * (w * tau).cos();
        (0..pieces)
            .map(|k| adaptive_simpson(&g, k as f64 * h, (k + 1) as f64 * h, 1e-9 * h))
            .sum::<f64>()
    };
    let pieces = (4.0 * (1.0 + cutoff * t)).ceil() as usize;
    let h = t / pieces as f64;
    (0..pieces)
        .map(|k| adaptive_simpson(&inner, k as f64 * h, (k + 1) as f64 * h, 1e-9 * h))
        .sum()
}

/// `0.5 e^{-2λ²t}/(1+(Ωt)²)^{2η}` style coherence magnitude.
pub fn coherence_closed_form(rho12_abs: f64, lam: f64, eta: f64, cutoff: f64, t: f64) -> f64 {
    rho12_abs * (-2.0 * lam * lam * t).exp() / (1.0 + (cutoff * t).powi(2)).powf(2.0 * eta)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| random_complex(rng))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let a = random_matrix(rng, n);
    (&a + &a.dagger()).scale_real(0.5)
}

/// `G G† / tr(G G†)`, with the Hermitian part taken to remove rounding.
pub fn random_density(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    let g = random_matrix(rng, n);
    let p = &g * &g.dagger();
    let tr = p.trace().re;
    DensityMatrix::single(p.scale_real(1.0 / tr).hermitian_part()).expect("valid by construction")
}

/// Random valid qubit state `(ρ₁₁, ρ₁₂)`.
pub fn random_qubit(rng: &mut ChaCha8Rng) -> (f64, C64) {
    let rho11: f64 = rng.random_range(0.05..0.95);
    let bound = (rho11 * (1.0 - rho11)).sqrt();
    let r = rng.random_range(0.0..bound);
    let phi = rng.random_range(0.0..std::f64::consts::TAU);
    (rho11, C64::from_polar(r, phi))
}

/// Hand-rolled `-i[h, x]`.
pub fn commutator_action(h: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    (&(h * x) - &(x * h)).scale(C64::new(0.0, -1.0))
}

/// Hand-rolled `l x l† - ½{l†l, x}`.
pub fn dissipator_action(l: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    let ld = l.dagger();
    let ll = &ld * l;
    &(&(l * x) * &ld) - &(&(&ll * x) + &(x * &ll)).scale_real(0.5)
}
