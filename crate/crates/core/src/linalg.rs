//! Small dense complex linear algebra: a row-major matrix type, a cyclic
//! Jacobi eigensolver for Hermitian matrices and a one-sided Jacobi SVD for
//! wide `3 × N` matrices.
//!
//! Matrices here are tiny (3×3 up to a few dozen square), so Jacobi methods
//! are both fast enough and accurate to working precision.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

#[allow(unused_imports)]
use num_traits::Float;

use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds from row-major data; `None` when the length does not match.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Option<Self> {
        (data.len() == rows * cols).then_some(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul_mat(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix-matrix dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Largest `|A − Aᴴ|` entry divided by the largest `|A|` entry.
    pub fn hermitian_defect(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let scale = self.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst / scale
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot_conj(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Unitary 2×2 rotation `[[c, s], [−s·e̅, c·e̅]]` (e = phase of `h`) that
/// diagonalizes the Hermitian block `[[a, h], [h̅, b]]`.
fn jacobi_rotation(a: f64, b: f64, h: C64) -> (f64, f64, C64) {
    let mag = h.norm();
    let phase = h / mag;
    let tau = (b - a) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, phase.conj())
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Descending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: CMatrix,
}

/// Cyclic Jacobi. Only the Hermitian part of `m` is meaningful; the input is
/// symmetrized first.
pub fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    assert_eq!(m.rows, m.cols, "eigendecomposition needs a square matrix");
    let n = m.rows;
    let mut a = CMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = CMatrix::identity(n);
    let total: f64 = a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-2 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let h = a[(p, q)];
                if h.norm() == 0.0 {
                    continue;
                }
                let (c, s, e) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, h);
                // A ← A·G
                for k in 0..n {
                    let (x, y) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = x * c - y * e * s;
                    a[(k, q)] = x * s + y * e * c;
                }
                // A ← Gᴴ·A
                for k in 0..n {
                    let (x, y) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = x * c - y * e.conj() * s;
                    a[(q, k)] = x * s + y * e.conj() * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                for k in 0..n {
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x * c - y * e * s;
                    v[(k, q)] = x * s + y * e * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    HermitianEigen {
        values: order.iter().map(|&i| a[(i, i)].re).collect(),
        vectors: CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]),
    }
}

/// Thin SVD of a `3 × N` matrix: `A = U·diag(s)·Vᴴ`.
#[derive(Debug, Clone)]
pub struct Svd3 {
    /// 3×3 unitary.
    pub u: CMatrix,
    /// Descending, non-negative.
    pub s: [f64; 3],
    /// N×3. Columns for zero singular values are completed to an
    /// orthonormal set when `N ≥ 3`; when `N < 3` columns `N..3` are zero.
    pub v: CMatrix,
}

/// One-sided Jacobi on `Aᴴ`: rotates its three columns until they are
/// mutually orthogonal. Cost is `O(N)` per sweep.
pub fn svd_3xn(a: &CMatrix) -> Svd3 {
    assert_eq!(a.rows, 3, "svd_3xn needs a 3 × N matrix");
    let n = a.cols;
    let mut b: [Vec<C64>; 3] = core::array::from_fn(|k| a.row(k).iter().map(|z| z.conj()).collect());
    let mut j = CMatrix::identity(3);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..3 {
            for q in p + 1..3 {
                let alpha: f64 = b[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = b[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = dot_conj(&b[p], &b[q]);
                if gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let (c, s, e) = jacobi_rotation(alpha, beta, gamma);
                let (bp, bq) = {
                    let (lo, hi) = b.split_at_mut(q);
                    (&mut lo[p], &mut hi[0])
                };
                for (x, y) in bp.iter_mut().zip(bq.iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = xp * c - yq * e * s;
                    *y = xp * s + yq * e * c;
                }
                for k in 0..3 {
                    let (x, y) = (j[(k, p)], j[(k, q)]);
                    j[(k, p)] = x * c - y * e * s;
                    j[(k, q)] = x * s + y * e * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: [f64; 3] = core::array::from_fn(|k| norm(&b[k]));
    let mut order = [0usize, 1, 2];
    order.sort_by(|&x, &y| sigma[y].total_cmp(&sigma[x]));
    let s = order.map(|k| sigma[k]);
    let u = CMatrix::from_fn(3, 3, |i, c| j[(i, order[c])]);

    let mut v = CMatrix::zeros(n, 3);
    let tiny = s[0] * 1e-150;
    let mut filled = 0;
    for (c, &k) in order.iter().enumerate() {
        if s[c] > tiny && s[c] > 0.0 {
            for i in 0..n {
                v[(i, c)] = b[k][i] / s[c];
            }
            filled += 1;
        }
    }
    if filled < 3 {
        complete_orthonormal(&mut v, filled);
    }
    Svd3 { u, s, v }
}

/// Fills columns `from..` of `v` with unit vectors orthogonal to the
/// preceding columns, drawing candidates from the standard basis.
fn complete_orthonormal(v: &mut CMatrix, from: usize) {
    let (n, cols) = (v.rows, v.cols);
    let mut col = from;
    for e in 0..n {
        if col >= cols {
            break;
        }
        let mut cand = vec![ZERO; n];
        cand[e] = ONE;
        // two Gram-Schmidt passes
        for _ in 0..2 {
            for c in 0..col {
                let basis = v.column(c);
                let proj = dot_conj(&basis, &cand);
                for (x, b) in cand.iter_mut().zip(&basis) {
                    *x -= proj * b;
                }
            }
        }
        let nrm = norm(&cand);
        if nrm > 1e-8 {
            for (i, x) in cand.iter().enumerate() {
                v[(i, col)] = x / nrm;
            }
            col += 1;
        }
    }
}
