use std::f64::consts::TAU;

use super::{cat_matrix, wrap, DynamicalSystem, PhaseSpace, Point};
use crate::error::{Error, Result};
use crate::matrixcore::SquareMatrix;

/// Skew product of a standard map over a power of the cat map on `T² × T²`:
/// `(z, w) ↦ (s(z) + (π₁ Aᴺ w, 0), A²ᴺ w)` with
/// `s(x, y) = (x + y + k sin 2πx, y + k sin 2πx)`, `k = K/2π`.
#[derive(Clone, Debug)]
pub struct StandardSkew {
    coupling: f64,
    power: u32,
    a_n: SquareMatrix,
    a_2n: SquareMatrix,
    a_2n_inv: SquareMatrix,
    space: PhaseSpace,
}

fn int_pow(a: &SquareMatrix, n: u32) -> SquareMatrix {
    (0..n).fold(SquareMatrix::identity(a.dim()), |acc, _| acc.mul(a))
}

pub fn make_standard_skew(coupling: f64, power: u32) -> Result<StandardSkew> {
    if power < 1 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    if !coupling.is_finite() {
        return Err(Error::InvalidInput("K must be finite".into()));
    }
    let a = cat_matrix();
    let a_n = int_pow(&a, power);
    let a_2n = int_pow(&a, 2 * power);
    if a_2n.max_abs() > 2f64.powi(40) {
        return Err(Error::InvalidInput(format!("N = {power} too large for exact integer powers")));
    }
    let a_inv = SquareMatrix::from_rows(&[[1.0, -1.0], [-1.0, 2.0]])?;
    Ok(StandardSkew {
        coupling,
        power,
        a_n,
        a_2n,
        a_2n_inv: int_pow(&a_inv, 2 * power),
        space: PhaseSpace::torus(4),
    })
}

impl StandardSkew {
    fn k(&self) -> f64 {
        self.coupling / TAU
    }

    /// The `A²ᴺ` block acting on the base.
    pub fn fiber_block(&self) -> &SquareMatrix {
        &self.a_2n
    }

    fn shift(&self, w0: f64, w1: f64) -> f64 {
        self.a_n[(0, 0)] * w0 + self.a_n[(0, 1)] * w1
    }
}

impl DynamicalSystem for StandardSkew {
    fn name(&self) -> &str {
        "skew"
    }

    fn space(&self) -> &PhaseSpace {
        &self.space
    }

    fn params(&self) -> Vec<(String, f64)> {
        vec![("K".into(), self.coupling), ("N".into(), self.power as f64)]
    }

    fn eval(&self, p: &Point) -> Point {
        let (x, y, w0, w1) = (p[0], p[1], p[2], p[3]);
        let kick = self.k() * (TAU * x).sin();
        let y1 = y + kick;
        let x1 = x + y1 + self.shift(w0, w1);
        let b = &self.a_2n;
        Point::new(&[
            wrap(x1),
            wrap(y1),
            wrap(b[(0, 0)] * w0 + b[(0, 1)] * w1),
            wrap(b[(1, 0)] * w0 + b[(1, 1)] * w1),
        ])
    }

    fn differential(&self, p: &Point) -> SquareMatrix {
        let c = self.coupling * (TAU * p[0]).cos();
        let mut m = SquareMatrix::zeros(4);
        m[(0, 0)] = 1.0 + c;
        m[(0, 1)] = 1.0;
        m[(1, 0)] = c;
        m[(1, 1)] = 1.0;
        m[(0, 2)] = self.a_n[(0, 0)];
        m[(0, 3)] = self.a_n[(0, 1)];
        for i in 0..2 {
            for j in 0..2 {
                m[(2 + i, 2 + j)] = self.a_2n[(i, j)];
            }
        }
        m
    }

    fn is_invertible(&self) -> bool {
        true
    }

    fn inverse_eval(&self, p: &Point) -> Option<Point> {
        let b = &self.a_2n_inv;
        let w0 = wrap(b[(0, 0)] * p[2] + b[(0, 1)] * p[3]);
        let w1 = wrap(b[(1, 0)] * p[2] + b[(1, 1)] * p[3]);
        let x1 = p[0] - self.shift(w0, w1);
        let y1 = p[1];
        let x = wrap(x1 - y1);
        let y = wrap(y1 - self.k() * (TAU * x).sin());
        Some(Point::new(&[x, y, w0, w1]))
    }
}
