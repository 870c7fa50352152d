//! Operators built from local factors on a tensor-product space.
//!
//! Applying `I ⊗ .. ⊗ op ⊗ .. ⊗ I` to a joint matrix costs `D²·d` instead of
//! the `D³` of a dense product, which is what makes brute-force evolution of
//! a qubit plus several oscillator modes affordable.

use crate::error::{Error, Result};
use crate::matrix::{kron, ComplexMatrix, C64, ZERO};

/// `I ⊗ .. ⊗ op ⊗ .. ⊗ I` with `op` on factor `site`.
pub fn embed(op: &ComplexMatrix, site: usize, dims: &[usize]) -> ComplexMatrix {
    dims.iter().enumerate().fold(ComplexMatrix::identity(1), |acc, (k, &d)| {
        if k == site {
            kron(&acc, op)
        } else {
            kron(&acc, &ComplexMatrix::identity(d))
        }
    })
}

fn layout(dims: &[usize], site: usize) -> (usize, usize, usize) {
    let pre = dims[..site].iter().product();
    let post = dims[site + 1..].iter().product();
    (pre, dims[site], post)
}

/// `(I ⊗ op ⊗ I) · x`.
pub fn apply_left(op: &ComplexMatrix, site: usize, dims: &[usize], x: &ComplexMatrix) -> ComplexMatrix {
    let (pre, d, post) = layout(dims, site);
    let n = x.cols();
    let mut out = ComplexMatrix::zeros(x.rows(), n);
    let src = x.as_slice();
    let dst = out.as_mut_slice();
    for p in 0..pre {
        for a in 0..d {
            for b in 0..d {
                let c = op[(a, b)];
                if c == ZERO {
                    continue;
                }
                for q in 0..post {
                    let ro = ((p * d + a) * post + q) * n;
                    let ri = ((p * d + b) * post + q) * n;
                    for (o, &v) in dst[ro..ro + n].iter_mut().zip(&src[ri..ri + n]) {
                        *o += c * v;
                    }
                }
            }
        }
    }
    out
}

/// `x · (I ⊗ op ⊗ I)`.
pub fn apply_right(op: &ComplexMatrix, site: usize, dims: &[usize], x: &ComplexMatrix) -> ComplexMatrix {
    let (pre, d, post) = layout(dims, site);
    let n = x.cols();
    let mut out = ComplexMatrix::zeros(x.rows(), n);
    let nz: Vec<(usize, usize, C64)> = (0..d)
        .flat_map(|b| (0..d).map(move |a| (b, a)))
        .filter_map(|(b, a)| {
            let c = op[(b, a)];
            (c != ZERO).then_some((b, a, c))
        })
        .collect();
    let src = x.as_slice();
    let dst = out.as_mut_slice();
    for r in 0..x.rows() {
        let row_in = &src[r * n..(r + 1) * n];
        let row_out = &mut dst[r * n..(r + 1) * n];
        for p in 0..pre {
            for &(b, a, c) in &nz {
                let ci = (p * d + b) * post;
                let co = (p * d + a) * post;
                for q in 0..post {
                    row_out[co + q] += row_in[ci + q] * c;
                }
            }
        }
    }
    out
}

/// A scalar times a product of operators on distinct factors.
#[derive(Debug, Clone)]
pub struct ProductTerm {
    pub coeff: C64,
    pub factors: Vec<(usize, ComplexMatrix)>,
}

/// An operator `Σ_terms coeff · ⊗_sites op`, applied without materialising it.
#[derive(Debug, Clone)]
pub struct TensorOperator {
    dims: Vec<usize>,
    terms: Vec<ProductTerm>,
}

impl TensorOperator {
    pub fn new(dims: Vec<usize>) -> Self {
        Self { dims, terms: Vec::new() }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn terms(&self) -> &[ProductTerm] {
        &self.terms
    }

    /// Adds `coeff · ⊗ factors`; sites must be distinct and in range.
    pub fn push(&mut self, coeff: C64, factors: Vec<(usize, ComplexMatrix)>) -> Result<()> {
        let mut seen = vec![false; self.dims.len()];
        for (site, op) in &factors {
            let d = *self.dims.get(*site).ok_or_else(|| {
                Error::param("site", format!("{site} out of range for {} factors", self.dims.len()))
            })?;
            if seen[*site] {
                return Err(Error::param("site", format!("factor {site} repeated in one term")));
            }
            seen[*site] = true;
            if op.rows() != d || op.cols() != d {
                return Err(Error::dim("TensorOperator::push", format!("{d}x{d}"), format!("{}x{}", op.rows(), op.cols())));
            }
        }
        self.terms.push(ProductTerm { coeff, factors });
        Ok(())
    }

    pub fn apply_left(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(x.rows(), x.cols());
        for term in &self.terms {
            let mut y = x.clone();
            for (site, op) in &term.factors {
                y = apply_left(op, *site, &self.dims, &y);
            }
            out += &y.scale(term.coeff);
        }
        out
    }

    pub fn apply_right(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(x.rows(), x.cols());
        for term in &self.terms {
            let mut y = x.clone();
            for (site, op) in &term.factors {
                y = apply_right(op, *site, &self.dims, &y);
            }
            out += &y.scale(term.coeff);
        }
        out
    }

    /// `[self, x]`.
    pub fn commutator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &self.apply_left(x) - &self.apply_right(x)
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for term in &self.terms {
            let mut full = ComplexMatrix::identity(1);
            for (k, &dk) in self.dims.iter().enumerate() {
                let factor = term
                    .factors
                    .iter()
                    .find(|(s, _)| *s == k)
                    .map(|(_, op)| op.clone())
                    .unwrap_or_else(|| ComplexMatrix::identity(dk));
                full = kron(&full, &factor);
            }
            out += &full.scale(term.coeff);
        }
        out
    }
}

/// Compressed-sparse-row square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseMatrix {
    /// Sums duplicate `(row, col)` entries and drops exact zeros.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside {n}x{n}");
            if last == Some((r, c)) {
                *vals.last_mut().expect("previous entry") += v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
                last = Some((r, c));
            }
        }
        let (mut cols_out, mut vals_out) = (Vec::with_capacity(cols.len()), Vec::with_capacity(vals.len()));
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v != ZERO {
                row_ptr[r + 1] += 1;
                cols_out.push(c);
                vals_out.push(v);
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            cols: cols_out,
            vals: vals_out,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    /// `self · x`.
    pub fn mul_left(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let m = x.cols();
        let mut out = ComplexMatrix::zeros(self.n, m);
        let src = x.as_slice();
        let dst = out.as_mut_slice();
        for i in 0..self.n {
            let row_out = &mut dst[i * m..(i + 1) * m];
            for (k, h) in self.row(i) {
                for (o, &v) in row_out.iter_mut().zip(&src[k * m..(k + 1) * m]) {
                    *o += h * v;
                }
            }
        }
        out
    }

    /// `x · self`.
    pub fn mul_right(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(x.rows(), self.n);
        let n = self.n;
        let src = x.as_slice();
        let dst = out.as_mut_slice();
        for r in 0..x.rows() {
            let row_in = &src[r * n..(r + 1) * n];
            let row_out = &mut dst[r * n..(r + 1) * n];
            for (k, &xv) in row_in.iter().enumerate() {
                if xv == ZERO {
                    continue;
                }
                for (j, h) in self.row(k) {
                    row_out[j] += xv * h;
                }
            }
        }
        out
    }

    /// `[self, x]`.
    pub fn commutator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &self.mul_left(x) - &self.mul_right(x)
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                out[(i, j)] += v;
            }
        }
        out
    }
}

impl TensorOperator {
    /// Sparse joint-space matrix of the operator.
    pub fn to_sparse(&self) -> SparseMatrix {
        let mut triplets = Vec::new();
        for term in &self.terms {
            let mut entries = vec![(0usize, 0usize, term.coeff)];
            for (k, &dk) in self.dims.iter().enumerate() {
                let factor = term.factors.iter().find(|(s, _)| *s == k).map(|(_, op)| op);
                let nz: Vec<(usize, usize, C64)> = match factor {
                    Some(op) => (0..dk)
                        .flat_map(|a| (0..dk).map(move |b| (a, b)))
                        .filter(|&(a, b)| op[(a, b)] != ZERO)
                        .map(|(a, b)| (a, b, op[(a, b)]))
                        .collect(),
                    None => (0..dk).map(|a| (a, a, C64::new(1.0, 0.0))).collect(),
                };
                entries = entries
                    .iter()
                    .flat_map(|&(r, c, v)| nz.iter().map(move |&(a, b, w)| (r * dk + a, c * dk + b, v * w)))
                    .collect();
            }
            triplets.extend(entries);
        }
        SparseMatrix::from_triplets(self.dim(), triplets)
    }
}
