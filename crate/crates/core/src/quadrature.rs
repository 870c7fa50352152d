//! Composite Gauss-Legendre quadrature.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_a^b f` on `panels` equal sub-intervals.
    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            let mut s = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                s += w * f(mid + 0.5 * h * x);
            }
            acc += 0.5 * h * s;
        }
        acc
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const ORDER: usize = 16;
/// Truncation of the frequency integral in units of the cutoff.
const OMEGA_SPAN: f64 = 60.0;

/// Numeric `∫₀ᵗ dτ ∫₀^∞ dω ω e^{-ω/Ω} cos(ωτ)` on a tensor Gauss-Legendre grid.
pub fn ohmic_kernel_quadrature(cutoff: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let gl = GaussLegendre::new(ORDER);
    let w_max = OMEGA_SPAN * cutoff;
    let inner = |tau: f64| {
        // Each panel spans less than a third of a period of cos(ωτ).
        let panels = (0.5 * OMEGA_SPAN * (1.0 + cutoff * tau.abs())).ceil() as usize;
        gl.integrate(|w| w * (-w / cutoff).exp() * (w * tau).cos(), 0.0, w_max, panels)
    };
    let outer_panels = (8.0 * (1.0 + cutoff * t)).ceil() as usize;
    gl.integrate(inner, 0.0, t, outer_panels)
}
