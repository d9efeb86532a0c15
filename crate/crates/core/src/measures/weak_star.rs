//! Weak* proxy: the largest gap between integrals of a finite test
//! dictionary. Circle axes use Fourier modes `e^{2πikx}`, segment axes use
//! Chebyshev polynomials on the rescaled coordinate; a multi-index ranges
//! over `|k|∞ ≤ K` and contributes its real and (when non-trivial)
//! imaginary part. On a torus this is `{1} ∪ {cos 2πk·x, sin 2πk·x}`.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, CHUNK};
use crate::systems::{Axis, PhaseSpace, Point};

use super::types::{EmpiricalMeasure, GridMeasure};

pub const DEFAULT_MODES: usize = 4;

/// Either kind of measure, for the weak* proxy.
#[derive(Clone, Copy, Debug)]
pub enum Measure<'a> {
    Empirical(&'a EmpiricalMeasure),
    Grid(&'a GridMeasure),
}

impl<'a> From<&'a EmpiricalMeasure> for Measure<'a> {
    fn from(m: &'a EmpiricalMeasure) -> Self {
        Measure::Empirical(m)
    }
}

impl<'a> From<&'a GridMeasure> for Measure<'a> {
    fn from(m: &'a GridMeasure) -> Self {
        Measure::Grid(m)
    }
}

impl Measure<'_> {
    pub fn space(&self) -> &PhaseSpace {
        match self {
            Measure::Empirical(m) => &m.space,
            Measure::Grid(m) => &m.space,
        }
    }
}

fn axis_len(axis: &Axis, k: usize) -> usize {
    match axis {
        Axis::Circle => 2 * k + 1,
        Axis::Segment { .. } => k + 1,
    }
}

fn chebyshev(t: f64, k: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(k + 2);
    v.push(1.0);
    if k >= 1 {
        v.push(t);
    }
    for n in 2..=k {
        let next = 2.0 * t * v[n - 1] - v[n - 2];
        v.push(next);
    }
    v
}

/// Basis values of one axis at `x`.
fn axis_values(axis: &Axis, x: f64, k: usize) -> Vec<Complex64> {
    match *axis {
        Axis::Circle => {
            let step = Complex64::from_polar(1.0, TAU * x);
            let inv = step.conj();
            let mut v = vec![Complex64::new(1.0, 0.0); 2 * k + 1];
            for m in 1..=k {
                v[k + m] = v[k + m - 1] * step;
                v[k - m] = v[k - m + 1] * inv;
            }
            v
        }
        Axis::Segment { lo, hi } => {
            let t = 2.0 * (x - lo) / (hi - lo) - 1.0;
            chebyshev(t, k).into_iter().map(|c| Complex64::new(c, 0.0)).collect()
        }
    }
}

/// Exact averages of the basis over the axis interval `[a, b]`.
fn axis_cell_averages(axis: &Axis, a: f64, b: f64, k: usize) -> Vec<Complex64> {
    match *axis {
        Axis::Circle => (0..2 * k + 1)
            .map(|idx| {
                let m = idx as f64 - k as f64;
                if m == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    let eb = Complex64::from_polar(1.0, TAU * m * b);
                    let ea = Complex64::from_polar(1.0, TAU * m * a);
                    (eb - ea) / Complex64::new(0.0, TAU * m * (b - a))
                }
            })
            .collect(),
        Axis::Segment { lo, hi } => {
            let ta = 2.0 * (a - lo) / (hi - lo) - 1.0;
            let tb = 2.0 * (b - lo) / (hi - lo) - 1.0;
            let prim = |t: f64| -> Vec<f64> {
                let c = chebyshev(t, k + 1);
                (0..=k)
                    .map(|n| match n {
                        0 => t,
                        1 => 0.5 * t * t,
                        _ => c[n + 1] / (2.0 * (n as f64 + 1.0)) - c[n - 1] / (2.0 * (n as f64 - 1.0)),
                    })
                    .collect()
            };
            let (pa, pb) = (prim(ta), prim(tb));
            (0..=k)
                .map(|n| Complex64::new((pb[n] - pa[n]) / (tb - ta), 0.0))
                .collect()
        }
    }
}

/// Tensor product of per-axis values, multi-index with the last axis fastest.
fn tensor(per_axis: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(1.0, 0.0)];
    for vals in per_axis {
        let mut next = Vec::with_capacity(acc.len() * vals.len());
        for a in &acc {
            for v in vals {
                next.push(a * v);
            }
        }
        acc = next;
    }
    acc
}

fn flatten(space: &PhaseSpace, k: usize, sums: &[Complex64]) -> Vec<f64> {
    let axes = space.axes();
    let lens: Vec<usize> = axes.iter().map(|a| axis_len(a, k)).collect();
    let mut out = Vec::with_capacity(2 * sums.len());
    for (idx, s) in sums.iter().enumerate() {
        // does this multi-index have a non-zero Fourier component?
        let mut rem = idx;
        let mut complex = false;
        for (a, len) in axes.iter().zip(&lens).rev() {
            let i = rem % len;
            rem /= len;
            if matches!(a, Axis::Circle) && i != k {
                complex = true;
            }
        }
        out.push(s.re);
        if complex {
            out.push(s.im);
        }
    }
    out
}

/// Integrals of every test function of the dictionary with cutoff `k`.
pub fn test_integrals(measure: Measure<'_>, k: usize) -> Vec<f64> {
    let space = measure.space().clone();
    let axes = space.axes();
    let m: usize = axes.iter().map(|a| axis_len(a, k)).product();
    let sum_parts = |parts: Vec<Vec<Complex64>>| -> Vec<Complex64> {
        let mut total = vec![Complex64::new(0.0, 0.0); m];
        for p in parts {
            for (t, v) in total.iter_mut().zip(p) {
                *t += v;
            }
        }
        total
    };
    let sums = match measure {
        Measure::Empirical(mu) => {
            let n_chunks = mu.points.len().div_ceil(CHUNK);
            let parts = map_indexed(n_chunks, |c| {
                let mut acc = vec![Complex64::new(0.0, 0.0); m];
                let hi = ((c + 1) * CHUNK).min(mu.points.len());
                for i in c * CHUNK..hi {
                    let p: &Point = &mu.points[i];
                    let per: Vec<Vec<Complex64>> =
                        axes.iter().enumerate().map(|(a, ax)| axis_values(ax, p[a], k)).collect();
                    let w = mu.weights[i];
                    for (t, v) in acc.iter_mut().zip(tensor(&per)) {
                        *t += v * w;
                    }
                }
                acc
            });
            sum_parts(parts)
        }
        Measure::Grid(g) => {
            let n_chunks = g.cells().div_ceil(CHUNK);
            let parts = map_indexed(n_chunks, |c| {
                let mut acc = vec![Complex64::new(0.0, 0.0); m];
                let hi = ((c + 1) * CHUNK).min(g.cells());
                for i in c * CHUNK..hi {
                    let mass = g.density[i];
                    if mass == 0.0 {
                        continue;
                    }
                    let b = g.cell_bounds(i);
                    let per: Vec<Vec<Complex64>> = axes
                        .iter()
                        .enumerate()
                        .map(|(a, ax)| axis_cell_averages(ax, b[a].0, b[a].1, k))
                        .collect();
                    for (t, v) in acc.iter_mut().zip(tensor(&per)) {
                        *t += v * mass;
                    }
                }
                acc
            });
            sum_parts(parts)
        }
    };
    flatten(&space, k, &sums)
}

/// `max_φ |∫φ dμ − ∫φ dν|` over the test dictionary with mode cutoff `k`.
pub fn weak_star_distance<'a, 'b>(
    mu: impl Into<Measure<'a>>,
    nu: impl Into<Measure<'b>>,
    k: usize,
) -> Result<f64> {
    let (mu, nu) = (mu.into(), nu.into());
    if mu.space() != nu.space() {
        return Err(Error::InvalidInput(format!(
            "measures live on different spaces: {:?} vs {:?}",
            mu.space(),
            nu.space()
        )));
    }
    let a = test_integrals(mu, k);
    let b = test_integrals(nu, k);
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}
