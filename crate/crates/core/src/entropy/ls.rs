use serde::{Deserialize, Serialize};

use super::{Diagnostics, EntropyEstimate, Method, FAILURE_LIMIT};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, tree_sum, CHUNK};
use crate::matrixcore::cocycle_wedge_series;
use crate::measures::EmpiricalMeasure;
use crate::systems::DynamicalSystem;

pub const DEFAULT_NMAX: usize = 40;
pub const MAX_NMAX: usize = 60;
pub const EARLY_STOP_DROP: f64 = 1e-4;
pub const EARLY_STOP_WINDOW: usize = 5;

/// Measure averages of `(1/n) log‖Df^n(x)^∧j‖` (and of the total) for
/// `n = 1..=n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct WedgeTable {
    pub dim: usize,
    pub n_max: usize,
    /// `total[n-1]`, mean of `log‖Df^n^∧‖ / n`.
    pub total: Vec<f64>,
    /// Weighted standard deviation of the same per-point values.
    pub total_sd: Vec<f64>,
    /// `wedge[j-1][n-1]`, mean of `log‖Df^n^∧j‖ / n`.
    pub wedge: Vec<Vec<f64>>,
    pub points: usize,
    pub skipped: usize,
}

/// Tabulates the wedge averages; points whose orbit fails are skipped and the
/// weights renormalized, unless more than 1% of them fail.
pub fn wedge_table(system: &dyn DynamicalSystem, measure: &EmpiricalMeasure, n_max: usize) -> Result<WedgeTable> {
    if n_max == 0 || n_max > MAX_NMAX {
        return Err(Error::InvalidInput(format!("n_max must lie in [1, {MAX_NMAX}], got {n_max}")));
    }
    if measure.space != *system.space() {
        return Err(Error::InvalidInput("measure and system live on different spaces".into()));
    }
    let d = system.dim();
    // per quantity q (d wedges, then total) and n: slot q * n_max + (n-1)
    let slots = (d + 1) * n_max;
    let npts = measure.len();
    let chunks = map_indexed(npts.div_ceil(CHUNK), |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(npts);
        let mut w_sum = Vec::with_capacity(hi - lo);
        let mut first = vec![Vec::with_capacity(hi - lo); slots];
        let mut second = vec![Vec::with_capacity(hi - lo); n_max];
        let mut failed = 0usize;
        for i in lo..hi {
            let w = measure.weights[i];
            let series = match cocycle_wedge_series(system, &measure.points[i], n_max) {
                Ok(s) => s,
                Err(Error::OrbitFailure { .. }) => {
                    failed += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            w_sum.push(w);
            for (k, prof) in series.iter().enumerate() {
                let n = (k + 1) as f64;
                for j in 0..d {
                    first[j * n_max + k].push(w * prof.log_wedge[j] / n);
                }
                let t = prof.log_wedge_total / n;
                first[d * n_max + k].push(w * t);
                second[k].push(w * t * t);
            }
        }
        let f: Vec<f64> = first.iter().map(|v| tree_sum(v)).collect();
        let s: Vec<f64> = second.iter().map(|v| tree_sum(v)).collect();
        Ok((tree_sum(&w_sum), f, s, failed))
    });
    let chunks = chunks.into_iter().collect::<Result<Vec<_>>>()?;
    let skipped: usize = chunks.iter().map(|c| c.3).sum();
    if skipped as f64 > FAILURE_LIMIT * npts as f64 || skipped == npts {
        return Err(Error::TooManyFailures { failed: skipped, total: npts, limit_pct: 100.0 * FAILURE_LIMIT });
    }
    let w = tree_sum(&chunks.iter().map(|c| c.0).collect::<Vec<_>>());
    let sum_slot = |s: usize| tree_sum(&chunks.iter().map(|c| c.1[s]).collect::<Vec<_>>()) / w;
    let wedge = (0..d).map(|j| (0..n_max).map(|k| sum_slot(j * n_max + k)).collect()).collect();
    let total: Vec<f64> = (0..n_max).map(|k| sum_slot(d * n_max + k)).collect();
    let total_sd = (0..n_max)
        .map(|k| {
            let m2 = tree_sum(&chunks.iter().map(|c| c.2[k]).collect::<Vec<_>>()) / w;
            (m2 - total[k] * total[k]).max(0.0).sqrt()
        })
        .collect();
    Ok(WedgeTable { dim: d, n_max, total, total_sd, wedge, points: npts, skipped })
}

/// `a_n` for `n = 1..=n_max` and its minimum, an upper bound on the entropy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LsSequence {
    pub a_n: Vec<f64>,
    /// 1-based `n` at which the minimum is attained (first one on ties).
    pub argmin: usize,
    pub value: f64,
    /// First `n` after which `a_n` drops by less than `1e-4` over 5 steps.
    pub converged_at: Option<usize>,
    pub points: usize,
    pub skipped: usize,
    /// Spread of the per-point values at `argmin` over `√points`.
    pub std_error: f64,
}

impl LsSequence {
    fn from_table(t: &WedgeTable) -> Self {
        let mut argmin = 0;
        for (k, a) in t.total.iter().enumerate() {
            if *a < t.total[argmin] {
                argmin = k;
            }
        }
        let converged_at = (0..t.n_max.saturating_sub(EARLY_STOP_WINDOW))
            .find(|&k| t.total[k] - t.total[k + EARLY_STOP_WINDOW] < EARLY_STOP_DROP)
            .map(|k| k + 1);
        let used = (t.points - t.skipped) as f64;
        LsSequence {
            a_n: t.total.clone(),
            argmin: argmin + 1,
            value: t.total[argmin],
            converged_at,
            points: t.points,
            skipped: t.skipped,
            std_error: t.total_sd[argmin] / used.sqrt(),
        }
    }

    pub fn estimate(&self) -> EntropyEstimate {
        EntropyEstimate {
            method: Method::LedrappierStrelcyn,
            value: self.value.max(0.0),
            std_error: self.std_error,
            diagnostics: Diagnostics::Ls(self.clone()),
        }
    }
}

pub fn ls_sequence(system: &dyn DynamicalSystem, measure: &EmpiricalMeasure, n_max: usize) -> Result<LsSequence> {
    Ok(LsSequence::from_table(&wedge_table(system, measure, n_max)?))
}

/// `min_{n ≤ n_max} (1/n)∫log‖Df^n^∧i‖dμ`.
pub fn exponent_function(system: &dyn DynamicalSystem, measure: &EmpiricalMeasure, i: usize, n_max: usize) -> Result<f64> {
    if i == 0 || i > system.dim() {
        return Err(Error::InvalidInput(format!("index must lie in [1, {}], got {i}", system.dim())));
    }
    let t = wedge_table(system, measure, n_max)?;
    Ok(t.wedge[i - 1].iter().copied().fold(f64::INFINITY, f64::min))
}

impl WedgeTable {
    pub fn ls(&self) -> LsSequence {
        LsSequence::from_table(self)
    }

    pub fn exponent_function(&self, i: usize) -> f64 {
        self.wedge[i - 1].iter().copied().fold(f64::INFINITY, f64::min)
    }
}
