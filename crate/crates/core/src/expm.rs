//! Matrix exponential.
//!
//! General matrices use scaling and squaring with the diagonal Padé
//! approximants of Higham (2005). Hermitian and anti-Hermitian inputs, which
//! cover every unitary propagator `exp(-iHt)`, are exponentiated exactly
//! through their eigendecomposition.

use crate::error::Result;
use crate::matrix::{eigh, solve, ComplexMatrix, C64};

#[allow(clippy::excessive_precision)]
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `exp(a)` for square `a`.
pub fn matexp(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.require_square("matexp")?;
    if n == 0 {
        return Ok(a.clone());
    }
    let scale = a.max_abs().max(1.0);
    let tol = 64.0 * f64::EPSILON * scale;
    if a.hermiticity_error() <= tol {
        return spectral_exp(a, C64::new(1.0, 0.0));
    }
    // a = i·h with h = -i·a Hermitian.
    let h = a.scale(C64::new(0.0, -1.0));
    if h.hermiticity_error() <= tol {
        return spectral_exp(&h, C64::new(0.0, 1.0));
    }
    pade_exp(a)
}

/// `exp(-i h t)` for Hermitian `h`.
pub fn unitary_propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    h.require_square("unitary_propagator")?;
    spectral_exp(h, C64::new(0.0, -t))
}

/// `V diag(exp(phase·λ)) V^†` for Hermitian `h = V diag(λ) V^†`.
fn spectral_exp(h: &ComplexMatrix, phase: C64) -> Result<ComplexMatrix> {
    let (vals, vecs) = eigh(h)?;
    let n = vals.len();
    let weights: Vec<C64> = vals.iter().map(|&l| (phase * l).exp()).collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += vecs[(i, k)] * weights[k] * vecs[(j, k)].conj();
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Scaling-and-squaring Padé exponential, valid for any square matrix.
pub fn pade_exp(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.require_square("pade_exp")?;
    let norm = a.norm_one();
    let ident = ComplexMatrix::identity(n);

    for &(m, theta) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            let (u, v) = pade_uv_low(a, coeffs, &ident);
            return rational(&u, &v);
        }
    }

    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let scaled = a.scale_real(0.5_f64.powi(squarings as i32));
    let (u, v) = pade_uv_13(&scaled, &ident);
    let mut r = rational(&u, &v)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

fn rational(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve(&(v - u), &(v + u))
}

fn pade_uv_low(
    a: &ComplexMatrix,
    b: &[f64],
    ident: &ComplexMatrix,
) -> (ComplexMatrix, ComplexMatrix) {
    let a2 = a * a;
    let mut odd = ident.scale_real(b[1]);
    let mut even = ident.scale_real(b[0]);
    let mut power = ident.clone();
    for k in 1..=(b.len() - 1) / 2 {
        power = &power * &a2;
        odd += &power.scale_real(b[2 * k + 1]);
        even += &power.scale_real(b[2 * k]);
    }
    (a * &odd, even)
}

fn pade_uv_13(a: &ComplexMatrix, ident: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let b = &B13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &(&a6.scale_real(b[13]) + &a4.scale_real(b[11])) + &a2.scale_real(b[9]);
    let u_sum = &(&(&(&a6 * &inner_u) + &a6.scale_real(b[7])) + &a4.scale_real(b[5]))
        + &(&a2.scale_real(b[3]) + &ident.scale_real(b[1]));
    let u = a * &u_sum;
    let inner_v = &(&a6.scale_real(b[12]) + &a4.scale_real(b[10])) + &a2.scale_real(b[8]);
    let v = &(&(&(&a6 * &inner_v) + &a6.scale_real(b[6])) + &a4.scale_real(b[4]))
        + &(&a2.scale_real(b[2]) + &ident.scale_real(b[0]));
    (u, v)
}
