//! Exterior-power norms `‖A^∧j‖ = σ₁⋯σⱼ` and the aggregate
//! `‖A^∧‖ = 1 + Σⱼ ‖A^∧j‖`, all carried in log scale.

use serde::{Deserialize, Serialize};

use super::matrix::SquareMatrix;
use super::svd::{singular_values, top_singular_value_of_columns};
use crate::error::{Error, Result};
use crate::systems::{DynamicalSystem, Orbit, Point};

/// Log-scale stand-in for `log 0`. Finite so totals stay comparable.
pub const LOG_ZERO: f64 = -1e308;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WedgeProfile {
    pub dim: usize,
    /// `log σᵢ`, descending.
    pub log_singular_values: Vec<f64>,
    /// Entry `j-1` holds `log ‖A^∧j‖`.
    pub log_wedge: Vec<f64>,
    /// `log(1 + Σⱼ ‖A^∧j‖)`.
    pub log_wedge_total: f64,
}

impl WedgeProfile {
    fn from_log_singular_values(log_sv: Vec<f64>) -> Self {
        let mut log_wedge = Vec::with_capacity(log_sv.len());
        let mut acc = 0.0;
        let mut dead = false;
        for &l in &log_sv {
            if dead || l <= LOG_ZERO {
                dead = true;
                log_wedge.push(LOG_ZERO);
            } else {
                acc += l;
                log_wedge.push(acc);
            }
        }
        WedgeProfile {
            dim: log_sv.len(),
            log_wedge_total: log_sum_exp_with_one(&log_wedge),
            log_singular_values: log_sv,
            log_wedge,
        }
    }

    fn from_log_wedge(log_wedge: Vec<f64>) -> Self {
        let mut prev = 0.0;
        let log_singular_values = log_wedge
            .iter()
            .map(|&w| {
                if w <= LOG_ZERO || prev <= LOG_ZERO {
                    prev = LOG_ZERO;
                    LOG_ZERO
                } else {
                    let s = w - prev;
                    prev = w;
                    s
                }
            })
            .collect();
        WedgeProfile {
            dim: log_wedge.len(),
            log_wedge_total: log_sum_exp_with_one(&log_wedge),
            log_singular_values,
            log_wedge,
        }
    }

    /// `log ‖A^∧j‖` for `1 ≤ j ≤ dim`.
    pub fn wedge(&self, j: usize) -> f64 {
        self.log_wedge[j - 1]
    }
}

/// `log(1 + Σ exp(wᵢ))` without overflow; sentinel entries contribute nothing.
pub fn log_sum_exp_with_one(ws: &[f64]) -> f64 {
    let m = ws
        .iter()
        .copied()
        .filter(|&w| w > LOG_ZERO)
        .fold(0.0f64, f64::max);
    let mut s = (-m).exp();
    for &w in ws {
        if w > LOG_ZERO {
            s += (w - m).exp();
        }
    }
    m + s.ln()
}

/// The top power `|det A|` comes from the double-double determinant rather
/// than the product of singular values, which keeps `σ_d` accurate for
/// ill-conditioned `A`.
pub fn wedge_profile(a: &SquareMatrix) -> WedgeProfile {
    let mut log_sv: Vec<f64> = singular_values(a)
        .into_iter()
        .map(|s| if s > 0.0 { s.ln() } else { LOG_ZERO })
        .collect();
    let d = log_sv.len();
    let (_, logdet) = a.log_abs_det();
    if logdet.is_finite() && log_sv.iter().all(|&l| l > LOG_ZERO) {
        let rest: f64 = log_sv[..d - 1].iter().sum();
        let last = logdet - rest;
        let mut p = WedgeProfile::from_log_singular_values(log_sv.clone());
        p.log_wedge[d - 1] = logdet;
        p.log_wedge_total = log_sum_exp_with_one(&p.log_wedge);
        log_sv[d - 1] = if d > 1 { last.min(log_sv[d - 2]) } else { last };
        p.log_singular_values = log_sv;
        return p;
    }
    WedgeProfile::from_log_singular_values(log_sv)
}

/// Index subsets of size `j` of `0..d`, lexicographic.
fn subsets(d: usize, j: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, j: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == j {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(i + 1, d, j, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, j, &mut Vec::with_capacity(j), &mut out);
    out
}

fn det_small(m: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if m[i * n + k].abs() > m[p * n + k].abs() {
                p = i;
            }
        }
        let pivot = m[p * n + k];
        if pivot == 0.0 {
            return 0.0;
        }
        if p != k {
            for c in 0..n {
                m.swap(p * n + c, k * n + c);
            }
            det = -det;
        }
        det *= pivot;
        for i in k + 1..n {
            let f = m[i * n + k] / pivot;
            for c in k..n {
                m[i * n + c] -= f * m[k * n + c];
            }
        }
    }
    det
}

/// The `j`-th compound matrix (matrix of `j×j` minors) of `a`, row-major,
/// with rows and columns indexed by lexicographic `j`-subsets. Its operator
/// norm equals `σ₁⋯σⱼ` of `a`, and compounds are multiplicative.
pub fn compound(a: &SquareMatrix, j: usize) -> (usize, Vec<f64>) {
    let d = a.dim();
    assert!((1..=d).contains(&j));
    let sets = subsets(d, j);
    let n = sets.len();
    let mut out = vec![0.0; n * n];
    let mut scratch = vec![0.0; j * j];
    for (r, rows) in sets.iter().enumerate() {
        for (c, cols) in sets.iter().enumerate() {
            for (ii, &ri) in rows.iter().enumerate() {
                for (jj, &cj) in cols.iter().enumerate() {
                    scratch[ii * j + jj] = a[(ri, cj)];
                }
            }
            out[r * n + c] = det_small(&mut scratch, j);
        }
    }
    (n, out)
}

const FLUSH: f64 = 1e-100;

/// Running product of compound matrices with max-abs rescaling.
struct CompoundProduct {
    j: usize,
    n: usize,
    p: Vec<f64>,
    log_scale: f64,
    dead: bool,
}

impl CompoundProduct {
    fn new(d: usize, j: usize) -> Self {
        let n = subsets(d, j).len();
        let mut p = vec![0.0; n * n];
        for i in 0..n {
            p[i * n + i] = 1.0;
        }
        CompoundProduct {
            j,
            n,
            p,
            log_scale: 0.0,
            dead: false,
        }
    }

    fn left_multiply(&mut self, a: &SquareMatrix) {
        if self.dead {
            return;
        }
        let (n, c) = compound(a, self.j);
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let cik = c[i * n + k];
                if cik == 0.0 {
                    continue;
                }
                for col in 0..n {
                    out[i * n + col] += cik * self.p[k * n + col];
                }
            }
        }
        let m = out.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if m == 0.0 {
            self.dead = true;
            return;
        }
        for v in out.iter_mut() {
            *v /= m;
            // σ₁ ≥ 1 after rescaling; dropping these keeps the SVD out of subnormals
            if v.abs() < FLUSH {
                *v = 0.0;
            }
        }
        self.p = out;
        self.log_scale += m.ln();
    }

    fn log_norm(&self) -> f64 {
        if self.dead {
            return LOG_ZERO;
        }
        // column-major copy of the row-major product
        let n = self.n;
        let mut cols = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                cols[k * n + i] = self.p[i * n + k];
            }
        }
        let top = top_singular_value_of_columns(&cols, n, n);
        if top > 0.0 {
            top.ln() + self.log_scale
        } else {
            LOG_ZERO
        }
    }
}

/// Wedge profiles of `Df^n(x)` for `n = 1..=n_max`, evaluated along the
/// orbit of `x`.
///
/// Each exterior power is propagated as its own compound-matrix product, so
/// every `‖Df^n(x)^∧j‖` is a top singular value and keeps full relative
/// accuracy even when the spread of singular values exceeds `1e16`.
pub fn cocycle_wedge_series(
    system: &dyn DynamicalSystem,
    x: &Point,
    n_max: usize,
) -> Result<Vec<WedgeProfile>> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let d = system.dim();
    let mut products: Vec<CompoundProduct> = (1..d).map(|j| CompoundProduct::new(d, j)).collect();
    let mut log_det = 0.0;
    let mut det_dead = false;
    let mut orbit = Orbit::from_point(system, *x);
    let mut out = Vec::with_capacity(n_max);
    for step in 0..n_max {
        let p = *orbit.current();
        if system.on_singular_set(&p) {
            return Err(Error::OrbitFailure {
                step,
                reason: format!("orbit reached the singular set at {:?}", p.as_slice()),
            });
        }
        let df = system.differential(&p);
        if let Err(e) = df.check_finite() {
            return Err(Error::OrbitFailure {
                step,
                reason: e.to_string(),
            });
        }
        for cp in products.iter_mut() {
            cp.left_multiply(&df);
        }
        let (_, la) = df.log_abs_det();
        if la == f64::NEG_INFINITY {
            det_dead = true;
        } else {
            log_det += la;
        }
        let mut log_wedge: Vec<f64> = products.iter().map(CompoundProduct::log_norm).collect();
        log_wedge.push(if det_dead { LOG_ZERO } else { log_det });
        out.push(WedgeProfile::from_log_wedge(log_wedge));
        orbit.advance();
    }
    Ok(out)
}

/// Wedge profile of `Df^n(x)`.
pub fn exact_cocycle_wedge(system: &dyn DynamicalSystem, x: &Point, n: usize) -> Result<WedgeProfile> {
    let mut series = cocycle_wedge_series(system, x, n)?;
    Ok(series.pop().expect("n >= 1"))
}
