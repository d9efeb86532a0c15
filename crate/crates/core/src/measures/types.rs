use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, tree_sum, CHUNK};
use crate::systems::{PhaseSpace, Point};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Provenance {
    Birkhoff { seed: u64, burn_in: usize, length: usize, restarts: usize },
    Grid { resolution: usize, samples_per_cell: usize, seed: u64, iterations: usize },
    Manual,
}

/// Weighted point cloud.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub kind: String,
    pub space: PhaseSpace,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub provenance: Provenance,
}

/// Result of a weighted average that may skip points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedMean {
    pub value: f64,
    pub used_weight: f64,
    pub skipped: usize,
}

impl EmpiricalMeasure {
    pub fn new(space: PhaseSpace, points: Vec<Point>, weights: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "{} points with {} weights",
                points.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidInput("weights must be finite and non-negative".into()));
        }
        if let Some(p) = points.iter().find(|p| !space.contains(p)) {
            return Err(Error::InvalidInput(format!("point {p:?} outside the phase space")));
        }
        let total = tree_sum(&weights);
        if !(total > 0.0) {
            return Err(Error::InvalidInput("weights sum to zero".into()));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(EmpiricalMeasure {
            kind: "empirical".into(),
            space,
            points,
            weights,
            provenance,
        })
    }

    pub fn uniform(space: PhaseSpace, points: Vec<Point>, provenance: Provenance) -> Result<Self> {
        let n = points.len();
        Self::new(space, points, vec![1.0; n], provenance)
    }

    pub fn dirac(space: PhaseSpace, p: Point) -> Result<Self> {
        Self::uniform(space, vec![p], Provenance::Manual)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        tree_sum(&self.weights)
    }

    /// `Σ w f(x) / Σ w` over the points where `f` is defined. Chunked with a
    /// fixed chunk length so the sum is independent of the worker count.
    pub fn weighted_mean<F>(&self, f: F) -> WeightedMean
    where
        F: Fn(&Point) -> Option<f64> + Sync + Send,
    {
        let n_chunks = self.points.len().div_ceil(CHUNK);
        let parts = map_indexed(n_chunks, |c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(self.points.len());
            let mut num = Vec::with_capacity(hi - lo);
            let mut den = Vec::with_capacity(hi - lo);
            let mut skipped = 0usize;
            for i in lo..hi {
                match f(&self.points[i]) {
                    Some(v) if v.is_finite() => {
                        num.push(self.weights[i] * v);
                        den.push(self.weights[i]);
                    }
                    _ => skipped += 1,
                }
            }
            (tree_sum(&num), tree_sum(&den), skipped)
        });
        let num: Vec<f64> = parts.iter().map(|p| p.0).collect();
        let den: Vec<f64> = parts.iter().map(|p| p.1).collect();
        let skipped = parts.iter().map(|p| p.2).sum();
        let used = tree_sum(&den);
        WeightedMean {
            value: if used > 0.0 { tree_sum(&num) / used } else { f64::NAN },
            used_weight: used,
            skipped,
        }
    }

    /// Mass of `{x : pred(x)}`.
    pub fn mass_where<F>(&self, pred: F) -> f64
    where
        F: Fn(&Point) -> bool + Sync + Send,
    {
        let n_chunks = self.points.len().div_ceil(CHUNK);
        let parts = map_indexed(n_chunks, |c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(self.points.len());
            let v: Vec<f64> = (lo..hi)
                .filter(|&i| pred(&self.points[i]))
                .map(|i| self.weights[i])
                .collect();
            tree_sum(&v)
        });
        tree_sum(&parts)
    }
}

/// Probability vector over a uniform grid; cells indexed row-major with the
/// last coordinate fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMeasure {
    pub kind: String,
    pub space: PhaseSpace,
    pub resolution: usize,
    pub density: Vec<f64>,
    pub provenance: Provenance,
}

impl GridMeasure {
    pub fn new(space: PhaseSpace, resolution: usize, density: Vec<f64>, provenance: Provenance) -> Result<Self> {
        let cells = resolution
            .checked_pow(space.dim() as u32)
            .ok_or_else(|| Error::InvalidInput("grid too large".into()))?;
        if density.len() != cells {
            return Err(Error::DimensionMismatch {
                expected: cells,
                got: density.len(),
            });
        }
        if density.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidInput("density entries must be non-negative".into()));
        }
        let total = tree_sum(&density);
        if !(total > 0.0) {
            return Err(Error::InvalidInput("density sums to zero".into()));
        }
        let density = density.into_iter().map(|v| v / total).collect();
        Ok(GridMeasure {
            kind: "grid".into(),
            space,
            resolution,
            density,
            provenance,
        })
    }

    pub fn uniform(space: PhaseSpace, resolution: usize) -> Result<Self> {
        let cells = resolution.pow(space.dim() as u32);
        Self::new(space, resolution, vec![1.0; cells], Provenance::Manual)
    }

    pub fn cells(&self) -> usize {
        self.density.len()
    }

    /// Per-axis `(lo, hi)` bounds of cell `idx`.
    pub fn cell_bounds(&self, idx: usize) -> Vec<(f64, f64)> {
        cell_bounds(&self.space, self.resolution, idx)
    }

    pub fn cell_of(&self, p: &Point) -> usize {
        cell_of(&self.space, self.resolution, p)
    }

    /// Cell centers weighted by the density.
    pub fn to_empirical(&self) -> Result<EmpiricalMeasure> {
        let mut pts = Vec::new();
        let mut w = Vec::new();
        for (i, &m) in self.density.iter().enumerate() {
            if m > 0.0 {
                let b = self.cell_bounds(i);
                let c: Vec<f64> = b.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
                pts.push(Point::new(&c));
                w.push(m);
            }
        }
        EmpiricalMeasure::new(self.space.clone(), pts, w, self.provenance.clone())
    }
}

pub(crate) fn cell_bounds(space: &PhaseSpace, res: usize, mut idx: usize) -> Vec<(f64, f64)> {
    let d = space.dim();
    let mut out = vec![(0.0, 0.0); d];
    for a in (0..d).rev() {
        let k = idx % res;
        idx /= res;
        let (lo, hi) = space.axis(a).bounds();
        let w = (hi - lo) / res as f64;
        out[a] = (lo + w * k as f64, lo + w * (k + 1) as f64);
    }
    out
}

pub(crate) fn cell_of(space: &PhaseSpace, res: usize, p: &Point) -> usize {
    let mut idx = 0;
    for a in 0..space.dim() {
        let (lo, hi) = space.axis(a).bounds();
        let t = (p[a] - lo) / (hi - lo) * res as f64;
        let k = if t <= 0.0 { 0 } else { (t.floor() as usize).min(res - 1) };
        idx = idx * res + k;
    }
    idx
}
