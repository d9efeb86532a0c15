use super::matrix::{SquareMatrix, MAX_DIM};
use super::qr::{orthonormalize, Frame};
use crate::error::{Error, Result};

/// Discrete QR accumulation of a matrix cocycle: the frame is carried
/// forward and re-orthonormalized each step, and the log-stretches of the
/// triangular factor are summed per column.
#[derive(Clone, Copy, Debug)]
pub struct CocycleAccumulator {
    frame: SquareMatrix,
    log_diag: [f64; MAX_DIM],
    steps: usize,
}

impl CocycleAccumulator {
    pub fn new(dim: usize) -> Self {
        CocycleAccumulator {
            frame: SquareMatrix::identity(dim),
            log_diag: [0.0; MAX_DIM],
            steps: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn frame(&self) -> &SquareMatrix {
        &self.frame
    }

    pub fn log_diag(&self) -> &[f64] {
        &self.log_diag[..self.dim()]
    }

    /// Per-column growth rates `log_diag / steps` (zeros before any step).
    pub fn rates(&self) -> Vec<f64> {
        let n = self.steps.max(1) as f64;
        self.log_diag().iter().map(|v| v / n).collect()
    }

    /// Applies one cocycle factor. On error the accumulator is unchanged.
    pub fn step(&mut self, df: &SquareMatrix) -> Result<()> {
        if df.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: df.dim(),
            });
        }
        df.check_finite()?;
        let d = self.dim();
        let pushed = Frame::new(df.mul(&self.frame), d);
        let (q, r) = orthonormalize(&pushed).map_err(|_| Error::OrbitFailure {
            step: self.steps,
            reason: "singular differential".into(),
        })?;
        for i in 0..d {
            self.log_diag[i] += r[(i, i)].ln();
        }
        self.frame = q.cols;
        self.steps += 1;
        Ok(())
    }

    /// Functional form of [`step`](Self::step).
    pub fn stepped(mut self, df: &SquareMatrix) -> Result<Self> {
        self.step(df)?;
        Ok(self)
    }
}
