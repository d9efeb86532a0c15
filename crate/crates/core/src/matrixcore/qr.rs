//! Orthonormal frames and QR re-orthonormalization.

use super::matrix::{SquareMatrix, MAX_DIM};
use super::svd::singular_values_of_columns;
use crate::error::{Error, Result};

/// `rank` orthonormal (or raw) column vectors in `R^dim`, stored as the first
/// `rank` columns of a square matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub cols: SquareMatrix,
    pub rank: usize,
}

impl Frame {
    pub fn new(cols: SquareMatrix, rank: usize) -> Self {
        assert!(rank <= cols.dim());
        Frame { cols, rank }
    }

    pub fn dim(&self) -> usize {
        self.cols.dim()
    }

    /// The first `rank` standard basis vectors.
    pub fn standard(dim: usize, rank: usize) -> Self {
        Frame::new(SquareMatrix::identity(dim), rank)
    }

    pub fn empty(dim: usize) -> Self {
        Frame::new(SquareMatrix::zeros(dim), 0)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        assert!(j < self.rank);
        self.cols.column(j)[..self.dim()].to_vec()
    }

    pub fn from_columns(dim: usize, columns: &[Vec<f64>]) -> Result<Self> {
        let mut m = SquareMatrix::zeros(dim);
        if columns.len() > dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: columns.len(),
            });
        }
        for (j, c) in columns.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: c.len(),
                });
            }
            m.set_column(j, c);
        }
        Ok(Frame::new(m, columns.len()))
    }

    /// `a · frame`, column by column.
    pub fn pushed(&self, a: &SquareMatrix) -> Frame {
        let d = self.dim();
        let mut out = SquareMatrix::zeros(d);
        for j in 0..self.rank {
            for i in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += a[(i, k)] * self.cols[(k, j)];
                }
                out[(i, j)] = s;
            }
        }
        Frame::new(out, self.rank)
    }

    /// Singular values of the `dim × rank` matrix, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let d = self.dim();
        let mut buf = Vec::with_capacity(d * self.rank);
        for j in 0..self.rank {
            buf.extend_from_slice(&self.cols.column(j)[..d]);
        }
        singular_values_of_columns(&buf, d, self.rank)
    }

    pub fn orthonormality_defect(&self) -> f64 {
        self.cols.orthonormality_defect(self.rank)
    }
}

/// Modified Gram-Schmidt with one re-orthogonalization pass.
///
/// Returns the orthonormal frame and the upper-triangular factor `R`
/// (a `rank × rank` matrix; the `dim` of a zero-rank result is 1).
/// A column that vanishes after projection is reported through `Err`.
pub fn orthonormalize(frame: &Frame) -> Result<(Frame, SquareMatrix)> {
    let d = frame.dim();
    let k = frame.rank;
    let mut q = frame.cols;
    let mut r = SquareMatrix::zeros(k.max(1));
    for j in 0..k {
        let mut v = [0.0; MAX_DIM];
        v[..d].copy_from_slice(&frame.cols.column(j)[..d]);
        let norm0 = v[..d].iter().fold(0.0f64, |a, &x| a.hypot(x));
        for _pass in 0..2 {
            for p in 0..j {
                let dot: f64 = (0..d).map(|i| q[(i, p)] * v[i]).sum();
                r[(p, j)] += dot;
                for (i, vi) in v.iter_mut().enumerate().take(d) {
                    *vi -= dot * q[(i, p)];
                }
            }
        }
        let norm = v[..d].iter().fold(0.0f64, |a, &x| a.hypot(x));
        if !(norm > 0.0) || norm <= norm0 * 1e-15 || !norm.is_finite() {
            return Err(Error::OrbitFailure {
                step: 0,
                reason: format!("frame column {j} degenerate under QR"),
            });
        }
        r[(j, j)] = norm;
        for i in 0..d {
            q[(i, j)] = v[i] / norm;
        }
    }
    for j in k..d {
        for i in 0..d {
            q[(i, j)] = 0.0;
        }
    }
    Ok((Frame::new(q, k), r))
}

/// Tracks `Df^n · frame` as `Q · R` with `R` rescaled to max-abs 1 and the
/// scale kept in log form, so products of many steps never overflow.
#[derive(Clone, Copy, Debug)]
pub struct FramePropagator {
    q: Frame,
    r: SquareMatrix,
    log_scale: f64,
}

impl FramePropagator {
    pub fn new(frame: &Frame) -> Result<Self> {
        let (q, r) = orthonormalize(frame)?;
        let mut p = FramePropagator {
            q,
            r,
            log_scale: 0.0,
        };
        p.rescale();
        Ok(p)
    }

    fn rescale(&mut self) {
        let m = self.r.max_abs();
        if m > 0.0 && m.is_finite() {
            self.r = self.r.scale(1.0 / m);
            self.log_scale += m.ln();
        }
    }

    pub fn push(&mut self, df: &SquareMatrix) -> Result<()> {
        if self.q.rank == 0 {
            return Ok(());
        }
        let (q, r_step) = orthonormalize(&self.q.pushed(df))?;
        self.q = q;
        self.r = r_step.mul(&self.r);
        self.rescale();
        Ok(())
    }

    /// Current orthonormal basis of `Df^n · span(frame)`.
    pub fn frame(&self) -> &Frame {
        &self.q
    }

    /// Natural logs of the singular values of `Df^n · frame`, descending.
    pub fn log_singular_values(&self) -> Vec<f64> {
        if self.q.rank == 0 {
            return Vec::new();
        }
        let k = self.q.rank;
        let mut buf = Vec::with_capacity(k * k);
        for j in 0..k {
            for i in 0..k {
                buf.push(self.r[(i, j)]);
            }
        }
        singular_values_of_columns(&buf, k, k)
            .into_iter()
            .map(|s| {
                if s > 0.0 {
                    s.ln() + self.log_scale
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect()
    }
}
