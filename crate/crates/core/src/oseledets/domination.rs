use serde::{Deserialize, Serialize};

use super::bundles::SplittingEstimate;
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::matrixcore::FramePropagator;
use crate::measures::diagnostics::linear_fit;
use crate::systems::DynamicalSystem;

pub const DEFAULT_N_GRID: [usize; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];
pub const RHO_THRESHOLD: f64 = 0.99;
pub const RESIDUAL_THRESHOLD: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Dominated,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub n_grid: Vec<usize>,
    /// `ratios[p][k]` is `r_n` at base point `p` for `n = n_grid[k]`.
    pub ratios: Vec<Vec<f64>>,
    /// `log max_p r_n`, the quantity fitted against `n`.
    pub log_max_ratio: Vec<f64>,
    pub c: f64,
    pub rho: f64,
    pub residual: f64,
    pub verdict: Verdict,
}

/// `r_n = ‖Df^n|E‖·‖(Df^n|F)⁻¹‖` at each base point, with a log-linear fit
/// `max_p r_n ≈ C ρ^n`. The norms are the extreme singular values of the
/// QR-propagated frames. Dominated iff `ρ ≤ 0.99` and the fit residual is at
/// most 0.1.
pub fn domination_report(
    system: &dyn DynamicalSystem,
    splitting: &SplittingEstimate,
    n_grid: &[usize],
) -> Result<DominationReport> {
    let d = system.dim();
    if splitting.dim_e + splitting.dim_f != d {
        return Err(Error::DimensionMismatch { expected: d, got: splitting.dim_e + splitting.dim_f });
    }
    if splitting.is_empty() {
        return Err(Error::InvalidInput("splitting has no base points".into()));
    }
    if n_grid.len() < 2 || n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] == 0 {
        return Err(Error::InvalidInput("n grid must be strictly increasing, positive, with at least two entries".into()));
    }
    if splitting.dim_e == 0 {
        let ones = vec![vec![1.0; n_grid.len()]; splitting.len()];
        return Ok(DominationReport {
            n_grid: n_grid.to_vec(),
            ratios: ones,
            log_max_ratio: vec![0.0; n_grid.len()],
            c: 1.0,
            rho: 0.0,
            residual: 0.0,
            verdict: Verdict::Dominated,
        });
    }
    let n_max = *n_grid.last().unwrap();
    let per_point = map_indexed(splitting.len(), |p| -> Result<Vec<f64>> {
        let mut e = FramePropagator::new(&splitting.e_frames[p])?;
        let mut f = FramePropagator::new(&splitting.f_frames[p])?;
        let mut x = splitting.points[p];
        let mut out = Vec::with_capacity(n_grid.len());
        let mut next = 0;
        for n in 1..=n_max {
            if system.on_singular_set(&x) {
                return Err(Error::OrbitFailure { step: n - 1, reason: "orbit reached the singular set".into() });
            }
            let df = system.differential(&x);
            e.push(&df)?;
            f.push(&df)?;
            x = system.eval(&x);
            if n == n_grid[next] {
                let le = e.log_singular_values()[0];
                let lf = *f.log_singular_values().last().unwrap();
                out.push((le - lf).exp());
                next += 1;
            }
        }
        Ok(out)
    });
    let ratios = per_point.into_iter().collect::<Result<Vec<_>>>()?;
    let log_max_ratio: Vec<f64> = (0..n_grid.len())
        .map(|k| ratios.iter().map(|r| r[k]).fold(0.0, f64::max).ln())
        .collect();
    let xs: Vec<f64> = n_grid.iter().map(|&n| n as f64).collect();
    let (a, b, residual) = linear_fit(&xs, &log_max_ratio);
    let rho = b.exp();
    let verdict = if rho <= RHO_THRESHOLD && residual <= RESIDUAL_THRESHOLD {
        Verdict::Dominated
    } else {
        Verdict::Undetermined
    };
    Ok(DominationReport { n_grid: n_grid.to_vec(), ratios, log_max_ratio, c: a.exp(), rho, residual, verdict })
}
