use super::{cat_matrix, wrap, DynamicalSystem, PhaseSpace, Point};
use crate::error::{Error, Result};
use crate::matrixcore::SquareMatrix;

/// Bump radius in the eigen-coordinates of the cat map.
pub const BUMP_RADIUS: f64 = 0.1;
/// Rate the stable direction is pushed toward at the origin as deformation → 1.
pub const WEAK_EXPANSION: f64 = 1.1;

/// Derived-from-Anosov isotopy of the cat map.
///
/// In eigen-coordinates `(u, s)` around the fixed point `0` the map is
/// `(u, s) ↦ (λu, s·exp(-log λ + δ·Δ·B(u, s)))` with
/// `B(u, s) = ψ(u/r) ψ(s/r)`, `ψ(t) = (1 - t²)³` on `|t| < 1`, and
/// `Δ = log(1.1) + log λ`, so the log-rate of the stable direction at the
/// origin moves linearly from `-log λ` (δ = 0) toward `log 1.1`. Outside the
/// bump the map is the cat map. `δ·Δ·max|tψ'(t)| < 1` for all `δ < 1`, which
/// keeps the fiber map monotone and the whole map a diffeomorphism.
#[derive(Clone, Debug)]
pub struct DerivedFromAnosov {
    deformation: f64,
    lambda: f64,
    delta_log: f64,
    vu: [f64; 2],
    vs: [f64; 2],
    cat: SquareMatrix,
    cat_inv: SquareMatrix,
    space: PhaseSpace,
}

pub fn make_derived_from_anosov(deformation: f64) -> Result<DerivedFromAnosov> {
    if !(0.0..1.0).contains(&deformation) {
        return Err(Error::InvalidInput(format!(
            "deformation = {deformation} outside [0, 1)"
        )));
    }
    let lambda = (3.0 + 5f64.sqrt()) / 2.0;
    // eigenvector of [[2,1],[1,1]] for λ: (1, λ - 2)
    let n = (1.0 + (lambda - 2.0).powi(2)).sqrt();
    let vu = [1.0 / n, (lambda - 2.0) / n];
    let vs = [-vu[1], vu[0]];
    let cat = cat_matrix();
    let cat_inv = SquareMatrix::from_rows(&[[1.0, -1.0], [-1.0, 2.0]])?;
    Ok(DerivedFromAnosov {
        deformation,
        lambda,
        delta_log: WEAK_EXPANSION.ln() + lambda.ln(),
        vu,
        vs,
        cat,
        cat_inv,
        space: PhaseSpace::torus(2),
    })
}

fn psi(t: f64) -> (f64, f64) {
    if t.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let a = 1.0 - t * t;
    (a * a * a, -6.0 * t * a * a)
}

/// Representative of `v mod 1` in `[-1/2, 1/2)`.
fn centered(v: f64) -> f64 {
    let w = wrap(v);
    if w >= 0.5 {
        w - 1.0
    } else {
        w
    }
}

struct Bump {
    corr: f64,
    d_corr_du: f64,
    d_corr_ds: f64,
}

impl DerivedFromAnosov {
    pub fn deformation(&self) -> f64 {
        self.deformation
    }

    pub fn unstable_direction(&self) -> [f64; 2] {
        self.vu
    }

    fn eigen_coords(&self, x: &Point) -> (f64, f64) {
        let a = centered(x[0]);
        let b = centered(x[1]);
        (self.vu[0] * a + self.vu[1] * b, self.vs[0] * a + self.vs[1] * b)
    }

    /// Additive correction to the stable coordinate, `s/λ·(e^{δΔB} - 1)`, and its partials.
    fn bump(&self, u: f64, s: f64) -> Option<Bump> {
        if self.deformation == 0.0 || u.abs() >= BUMP_RADIUS || s.abs() >= BUMP_RADIUS {
            return None;
        }
        let r = BUMP_RADIUS;
        let (pu, dpu) = psi(u / r);
        let (ps, dps) = psi(s / r);
        let k = self.deformation * self.delta_log;
        let e = (k * pu * ps).exp();
        let em1 = (k * pu * ps).exp_m1();
        let l = self.lambda;
        Some(Bump {
            corr: s / l * em1,
            d_corr_du: s / l * e * k * dpu / r * ps,
            d_corr_ds: em1 / l + s / l * e * k * pu * dps / r,
        })
    }

    fn stable_map(&self, u: f64, s: f64) -> (f64, f64) {
        match self.bump(u, s) {
            Some(b) => (s / self.lambda + b.corr, 1.0 / self.lambda + b.d_corr_ds),
            None => (s / self.lambda, 1.0 / self.lambda),
        }
    }
}

impl DynamicalSystem for DerivedFromAnosov {
    fn name(&self) -> &str {
        "da"
    }

    fn space(&self) -> &PhaseSpace {
        &self.space
    }

    fn params(&self) -> Vec<(String, f64)> {
        vec![("deformation".into(), self.deformation)]
    }

    fn eval(&self, x: &Point) -> Point {
        let a = &self.cat;
        let mut y = Point::new(&[
            a[(0, 0)] * x[0] + a[(0, 1)] * x[1],
            a[(1, 0)] * x[0] + a[(1, 1)] * x[1],
        ]);
        let (u, s) = self.eigen_coords(x);
        if let Some(b) = self.bump(u, s) {
            y[0] += b.corr * self.vs[0];
            y[1] += b.corr * self.vs[1];
        }
        y[0] = wrap(y[0]);
        y[1] = wrap(y[1]);
        y
    }

    fn differential(&self, x: &Point) -> SquareMatrix {
        let mut m = self.cat;
        let (u, s) = self.eigen_coords(x);
        if let Some(b) = self.bump(u, s) {
            let g = [
                b.d_corr_du * self.vu[0] + b.d_corr_ds * self.vs[0],
                b.d_corr_du * self.vu[1] + b.d_corr_ds * self.vs[1],
            ];
            for i in 0..2 {
                for j in 0..2 {
                    m[(i, j)] += self.vs[i] * g[j];
                }
            }
        }
        m
    }

    fn is_invertible(&self) -> bool {
        true
    }

    fn inverse_eval(&self, y: &Point) -> Option<Point> {
        let cat_pre = || {
            let a = &self.cat_inv;
            Point::new(&[
                wrap(a[(0, 0)] * y[0] + a[(0, 1)] * y[1]),
                wrap(a[(1, 0)] * y[0] + a[(1, 1)] * y[1]),
            ])
        };
        if self.deformation == 0.0 {
            return Some(cat_pre());
        }
        let (uy, sy) = self.eigen_coords(y);
        let u = uy / self.lambda;
        let r = BUMP_RADIUS;
        if u.abs() >= r || sy.abs() >= r / self.lambda {
            return Some(cat_pre());
        }
        // s ↦ stable_map(u, s) is increasing on [-r, r] with endpoints ±r/λ
        let (mut lo, mut hi) = (-r, r);
        let mut s = (sy * self.lambda).clamp(lo, hi);
        for _ in 0..100 {
            let (val, slope) = self.stable_map(u, s);
            let f = val - sy;
            if f == 0.0 {
                break;
            }
            if f > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let newton = s - f / slope;
            s = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-17 || f.abs() < 1e-17 {
                break;
            }
        }
        Some(Point::new(&[
            wrap(u * self.vu[0] + s * self.vs[0]),
            wrap(u * self.vu[1] + s * self.vs[1]),
        ]))
    }
}
