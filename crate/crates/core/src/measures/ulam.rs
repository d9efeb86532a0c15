use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, tree_sum};
use crate::seed::stream;
use crate::systems::{DynamicalSystem, PhaseSpace, Point};

use super::types::{cell_bounds, cell_of, GridMeasure, Provenance};

pub const MAX_CELLS: usize = 10_000_000;

/// Sparse row-stochastic matrix over grid cells (CSR).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix {
    pub space: PhaseSpace,
    pub resolution: usize,
    pub samples_per_cell: usize,
    pub seed: u64,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl TransferMatrix {
    pub fn n(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    /// Builds from explicit rows; used for hand-made chains.
    pub fn from_rows(space: PhaseSpace, resolution: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let n = rows.len();
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for (i, r) in rows.into_iter().enumerate() {
            let s: f64 = r.iter().map(|e| e.1).sum();
            if (s - 1.0).abs() > 1e-12 || r.iter().any(|e| e.1 < 0.0 || e.0 >= n) {
                return Err(Error::InvalidInput(format!("row {i} is not a probability vector")));
            }
            for (c, v) in r {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Ok(TransferMatrix {
            space,
            resolution,
            samples_per_cell: 0,
            seed: 0,
            row_ptr,
            cols,
            vals,
        })
    }

    /// `p · T`.
    pub fn left_apply(&self, p: &[f64]) -> Vec<f64> {
        let mut q = vec![0.0; self.n()];
        for (i, &pi) in p.iter().enumerate() {
            if pi == 0.0 {
                continue;
            }
            for (j, v) in self.row(i) {
                q[j] += pi * v;
            }
        }
        q
    }
}

/// Ulam discretization: row `i` is the distribution of image cells of
/// stratified random samples of cell `i` (one uniform point per sub-box,
/// `round(samples_per_cell^(1/d))` strata per axis).
pub fn ulam_matrix(
    system: &dyn DynamicalSystem,
    resolution: usize,
    samples_per_cell: usize,
    seed: u64,
) -> Result<TransferMatrix> {
    if resolution < 2 {
        return Err(Error::InvalidInput("resolution must be at least 2".into()));
    }
    if samples_per_cell == 0 {
        return Err(Error::InvalidInput("samples_per_cell must be positive".into()));
    }
    let space = system.space().clone();
    let d = space.dim();
    let cells = resolution
        .checked_pow(d as u32)
        .filter(|&c| c <= MAX_CELLS)
        .ok_or_else(|| Error::ResourceGuard(format!("{resolution}^{d} cells exceeds {MAX_CELLS}")))?;
    for a in 0..d {
        let (lo, hi) = space.axis(a).bounds();
        if !(hi > lo) {
            return Err(Error::InvalidInput(format!("axis {a} has zero length: cell volume 0")));
        }
    }
    let strata = ((samples_per_cell as f64).powf(1.0 / d as f64).round() as usize).max(1);
    let per_cell = strata.pow(d as u32);

    let rows = map_indexed(cells, |c| {
        let mut rng = stream(seed, c as u64);
        let b = cell_bounds(&space, resolution, c);
        let mut hits: Vec<usize> = Vec::with_capacity(per_cell);
        let mut sub = vec![0usize; d];
        for _ in 0..per_cell {
            let mut x = Point::zeros(d);
            for a in 0..d {
                let (lo, hi) = b[a];
                let t = (sub[a] as f64 + rng.gen::<f64>()) / strata as f64;
                x[a] = lo + (hi - lo) * t;
            }
            hits.push(cell_of(&space, resolution, &system.eval(&x)));
            for s in sub.iter_mut().rev() {
                *s += 1;
                if *s < strata {
                    break;
                }
                *s = 0;
            }
        }
        hits.sort_unstable();
        let mut row: Vec<(usize, f64)> = Vec::new();
        for h in hits {
            match row.last_mut() {
                Some((j, v)) if *j == h => *v += 1.0,
                _ => row.push((h, 1.0)),
            }
        }
        for e in row.iter_mut() {
            e.1 /= per_cell as f64;
        }
        row
    });

    let mut row_ptr = Vec::with_capacity(cells + 1);
    row_ptr.push(0);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    for r in rows {
        for (c, v) in r {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    Ok(TransferMatrix {
        space,
        resolution,
        samples_per_cell: per_cell,
        seed,
        row_ptr,
        cols,
        vals,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UlamStationary {
    pub measure: GridMeasure,
    pub iterations: usize,
    pub residual: f64,
}

/// Left power iteration from the uniform vector.
pub fn ulam_stationary(t: &TransferMatrix, tol: f64, max_iters: usize) -> Result<UlamStationary> {
    let n = t.n();
    ulam_stationary_from(t, &vec![1.0 / n as f64; n], tol, max_iters)
}

/// Left power iteration from `init` until the L1 change drops below `tol`.
pub fn ulam_stationary_from(
    t: &TransferMatrix,
    init: &[f64],
    tol: f64,
    max_iters: usize,
) -> Result<UlamStationary> {
    if init.len() != t.n() {
        return Err(Error::DimensionMismatch {
            expected: t.n(),
            got: init.len(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tol must be positive".into()));
    }
    let s = tree_sum(init);
    let mut p: Vec<f64> = init.iter().map(|v| v / s).collect();
    let mut residual = f64::INFINITY;
    for it in 1..=max_iters {
        let mut q = t.left_apply(&p);
        let s = tree_sum(&q);
        for v in q.iter_mut() {
            *v /= s;
        }
        let diffs: Vec<f64> = q.iter().zip(&p).map(|(a, b)| (a - b).abs()).collect();
        residual = tree_sum(&diffs);
        p = q;
        if residual < tol {
            let measure = GridMeasure::new(
                t.space.clone(),
                t.resolution,
                p,
                Provenance::Grid {
                    resolution: t.resolution,
                    samples_per_cell: t.samples_per_cell,
                    seed: t.seed,
                    iterations: it,
                },
            )?;
            return Ok(UlamStationary {
                measure,
                iterations: it,
                residual,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iters,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{make_manneville_pomeau, IdentityMap};

    #[test]
    fn doubling_rows_split_in_half() {
        let f = make_manneville_pomeau(0.0).unwrap();
        let t = ulam_matrix(&f, 64, 16, 3).unwrap();
        for i in 0..64 {
            let row: Vec<_> = t.row(i).collect();
            assert_eq!(row.len(), 2, "row {i}: {row:?}");
            assert_eq!(row[0], ((2 * i) % 64, 0.5));
            assert_eq!(row[1], ((2 * i + 1) % 64, 0.5));
        }
    }

    #[test]
    fn identity_map_gives_identity() {
        let t = ulam_matrix(&IdentityMap::new(PhaseSpace::torus(2)), 8, 9, 1).unwrap();
        assert_eq!(t.samples_per_cell, 9);
        for i in 0..64 {
            assert_eq!(t.row(i).collect::<Vec<_>>(), vec![(i, 1.0)]);
        }
        let s = ulam_stationary(&t, 1e-12, 10).unwrap();
        assert_eq!(s.iterations, 1);
        assert!(s.measure.density.iter().all(|&v| (v - 1.0 / 64.0).abs() < 1e-15));
    }

    #[test]
    fn rows_are_stochastic() {
        let f = make_manneville_pomeau(0.6).unwrap();
        let t = ulam_matrix(&f, 100, 20, 5).unwrap();
        for i in 0..t.n() {
            let s: f64 = t.row(i).map(|e| e.1).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn doubling_stationary_is_uniform() {
        let f = make_manneville_pomeau(0.0).unwrap();
        let t = ulam_matrix(&f, 64, 16, 3).unwrap();
        let s = ulam_stationary(&t, 1e-13, 1000).unwrap();
        for v in &s.measure.density {
            assert!((v - 1.0 / 64.0).abs() < 1e-6);
        }
    }

    #[test]
    fn period_two_oscillation_does_not_converge() {
        let t = TransferMatrix::from_rows(
            PhaseSpace::unit_interval(),
            2,
            vec![vec![(1, 1.0)], vec![(0, 1.0)]],
        )
        .unwrap();
        // uniform is stationary for a permutation; start from a Dirac instead
        assert!(ulam_stationary(&t, 1e-10, 50).is_ok());
        match ulam_stationary_from(&t, &[1.0, 0.0], 1e-10, 50) {
            Err(Error::NonConvergence { iterations, residual }) => {
                assert_eq!(iterations, 50);
                assert!((residual - 2.0).abs() < 1e-15);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn guards() {
        let f = make_manneville_pomeau(0.0).unwrap();
        assert!(ulam_matrix(&f, 1, 4, 0).is_err());
        let id = IdentityMap::new(PhaseSpace::torus(4));
        assert!(matches!(ulam_matrix(&id, 100, 1, 0), Err(Error::ResourceGuard(_))));
    }
}
