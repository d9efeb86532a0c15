use std::fmt;
use std::ops::{Index, IndexMut};

use super::dd::Dd;
use crate::error::{Error, Result};

pub const MAX_DIM: usize = 8;
const STRIDE: usize = MAX_DIM;

/// Dense real square matrix of dimension 1..=8, stored inline.
#[derive(Clone, Copy, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    a: [f64; MAX_DIM * MAX_DIM],
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        SquareMatrix {
            dim,
            a: [0.0; MAX_DIM * MAX_DIM],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        check_dim(values.len())?;
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds from row-major entries; `entries.len()` must be a square in 1..=64.
    pub fn from_row_major(dim: usize, entries: &[f64]) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let m = Self::from_fn(dim, |i, j| entries[i * dim + j]);
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        check_dim(dim)?;
        let mut flat = Vec::with_capacity(dim * dim);
        for r in rows {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.len(),
                });
            }
            flat.extend_from_slice(r);
        }
        Self::from_row_major(dim, &flat)
    }

    pub fn block_diag(a: &SquareMatrix, b: &SquareMatrix) -> Result<Self> {
        let dim = a.dim + b.dim;
        check_dim(dim)?;
        let mut m = Self::zeros(dim);
        for i in 0..a.dim {
            for j in 0..a.dim {
                m[(i, j)] = a[(i, j)];
            }
        }
        for i in 0..b.dim {
            for j in 0..b.dim {
                m[(a.dim + i, a.dim + j)] = b[(i, j)];
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row_major(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dim * self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    pub fn check_finite(&self) -> Result<()> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                if !self[(i, j)].is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.check_finite().is_ok()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch in product");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out.a[i * STRIDE + j] += aik * other.a[k * STRIDE + j];
                }
            }
        }
        out
    }

    pub fn try_mul(&self, other: &SquareMatrix) -> Result<SquareMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(self.mul(other))
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn scale(&self, s: f64) -> SquareMatrix {
        let mut m = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] *= s;
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                best = best.max(self[(i, j)].abs());
            }
        }
        best
    }

    /// Zero for singular matrices.
    pub fn det(&self) -> f64 {
        let (sign, logabs) = self.log_abs_det();
        if logabs == f64::NEG_INFINITY {
            0.0
        } else {
            sign * logabs.exp()
        }
    }

    /// `(sign, log|det|)` by LU with partial pivoting in double-double
    /// arithmetic, so the log is accurate to ~1e-16 absolute unless the
    /// condition number approaches 1e16. Singular matrices give `(0, -∞)`.
    pub fn log_abs_det(&self) -> (f64, f64) {
        let d = self.dim;
        let mut m = [[Dd::new(0.0); MAX_DIM]; MAX_DIM];
        for (i, row) in m.iter_mut().enumerate().take(d) {
            for (j, e) in row.iter_mut().enumerate().take(d) {
                *e = Dd::new(self[(i, j)]);
            }
        }
        let mut sign = 1.0;
        let mut logabs = 0.0;
        for k in 0..d {
            let mut p = k;
            for i in k + 1..d {
                if m[i][k].hi.abs() > m[p][k].hi.abs() {
                    p = i;
                }
            }
            let pivot = m[p][k];
            if pivot.hi == 0.0 {
                return (0.0, f64::NEG_INFINITY);
            }
            if p != k {
                m.swap(p, k);
                sign = -sign;
            }
            if pivot.hi < 0.0 {
                sign = -sign;
            }
            logabs += pivot.ln_abs();
            for i in k + 1..d {
                let factor = m[i][k] / pivot;
                if factor.hi != 0.0 {
                    let (top, rest) = m.split_at_mut(i);
                    for (a, b) in rest[0][k..].iter_mut().zip(&top[k][k..]) {
                        *a = *a - factor * *b;
                    }
                }
            }
        }
        (sign, logabs)
    }

    /// Gauss-Jordan inverse; `None` when a pivot vanishes.
    pub fn inverse(&self) -> Option<SquareMatrix> {
        let d = self.dim;
        let mut m = *self;
        let mut inv = Self::identity(d);
        for k in 0..d {
            let mut p = k;
            for i in k + 1..d {
                if m[(i, k)].abs() > m[(p, k)].abs() {
                    p = i;
                }
            }
            if m[(p, k)] == 0.0 {
                return None;
            }
            for j in 0..d {
                m.a.swap(p * STRIDE + j, k * STRIDE + j);
                inv.a.swap(p * STRIDE + j, k * STRIDE + j);
            }
            let pivot = m[(k, k)];
            for j in 0..d {
                m[(k, j)] /= pivot;
                inv[(k, j)] /= pivot;
            }
            for i in 0..d {
                if i == k {
                    continue;
                }
                let factor = m[(i, k)];
                if factor != 0.0 {
                    for j in 0..d {
                        m.a[i * STRIDE + j] -= factor * m.a[k * STRIDE + j];
                        inv.a[i * STRIDE + j] -= factor * inv.a[k * STRIDE + j];
                    }
                }
            }
        }
        Some(inv)
    }

    pub fn column(&self, j: usize) -> [f64; MAX_DIM] {
        let mut c = [0.0; MAX_DIM];
        for (i, ci) in c.iter_mut().enumerate().take(self.dim) {
            *ci = self[(i, j)];
        }
        c
    }

    pub fn set_column(&mut self, j: usize, c: &[f64]) {
        for i in 0..self.dim {
            self[(i, j)] = c[i];
        }
    }

    /// Max deviation of `QᵀQ` from the identity over the first `cols` columns.
    pub fn orthonormality_defect(&self, cols: usize) -> f64 {
        let mut worst = 0.0f64;
        for p in 0..cols {
            for q in p..cols {
                let dot: f64 = (0..self.dim).map(|i| self[(i, p)] * self[(i, q)]).sum();
                let target = if p == q { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "matrix dimension {dim} outside 1..={MAX_DIM}"
        )))
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.dim && j < self.dim);
        &self.a[i * STRIDE + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.a[i * STRIDE + j]
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<f64>> = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)]).collect())
            .collect();
        f.debug_struct("SquareMatrix")
            .field("dim", &self.dim)
            .field("rows", &rows)
            .finish()
    }
}
