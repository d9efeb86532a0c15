//! Executable dynamical systems with exact differentials.

mod da;
mod family;
mod identity;
mod mp;
mod point;
mod skew;
mod space;
mod torus;
mod viana;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

pub use da::{make_derived_from_anosov, DerivedFromAnosov};
pub use family::{build_system, family, FamilyHandle};
pub use identity::IdentityMap;
pub use mp::{make_manneville_pomeau, MannevillePomeau};
pub use point::Point;
pub use skew::{make_standard_skew, StandardSkew};
pub use space::{wrap, Axis, PhaseSpace};
pub use torus::{cat_map, cat_matrix, make_torus_automorphism, TorusAutomorphism};
pub use viana::{make_viana, Viana};

use crate::matrixcore::SquareMatrix;
use crate::seed::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularKind {
    /// Discontinuity of the map (branch point of an interval map).
    Branch,
    /// Zero of the derivative.
    Critical,
    /// Fixed point with derivative one.
    NeutralFixedPoint,
}

/// Component of a singular set: a point, or a coordinate hyperplane `{x[axis] = value}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SingularDescriptor {
    Point { at: Point, kind: SingularKind },
    Hyperplane { axis: usize, value: f64, kind: SingularKind },
}

impl SingularDescriptor {
    pub fn kind(&self) -> SingularKind {
        match self {
            SingularDescriptor::Point { kind, .. } | SingularDescriptor::Hyperplane { kind, .. } => *kind,
        }
    }

    pub fn distance(&self, space: &PhaseSpace, x: &Point) -> f64 {
        match self {
            SingularDescriptor::Point { at, .. } => space.distance(at, x),
            SingularDescriptor::Hyperplane { axis, value, .. } => space.axis(*axis).distance(x[*axis], *value),
        }
    }
}

pub trait DynamicalSystem: Send + Sync {
    fn name(&self) -> &str;
    fn space(&self) -> &PhaseSpace;
    fn params(&self) -> Vec<(String, f64)>;
    fn eval(&self, x: &Point) -> Point;
    fn differential(&self, x: &Point) -> SquareMatrix;

    fn singular_set(&self) -> &[SingularDescriptor] {
        &[]
    }

    fn is_invertible(&self) -> bool {
        false
    }

    fn inverse_eval(&self, _x: &Point) -> Option<Point> {
        None
    }

    /// Differential of the inverse at `x`, i.e. `Df(f⁻¹(x))⁻¹`.
    fn inverse_differential(&self, x: &Point) -> Option<SquareMatrix> {
        let pre = self.inverse_eval(x)?;
        self.differential(&pre).inverse()
    }

    /// Whether orbit iteration should refresh low mantissa bits.
    fn roundoff_refresh(&self) -> bool {
        true
    }

    fn dim(&self) -> usize {
        self.space().dim()
    }

    /// Max-metric distance to the singular set (`+∞` when it is empty).
    fn distance_to_singular_set(&self, x: &Point) -> f64 {
        self.singular_set()
            .iter()
            .map(|s| s.distance(self.space(), x))
            .fold(f64::INFINITY, f64::min)
    }

    fn on_singular_set(&self, x: &Point) -> bool {
        self.distance_to_singular_set(x) == 0.0
    }
}

/// Forward orbit, optionally with round-off refresh drawn from a fixed stream.
pub struct Orbit<'a> {
    system: &'a dyn DynamicalSystem,
    x: Point,
    rng: Option<Rng>,
}

impl<'a> Orbit<'a> {
    pub fn with_seed(system: &'a dyn DynamicalSystem, x: Point, seed: u64) -> Self {
        let rng = system
            .roundoff_refresh()
            .then(|| Rng::seed_from_u64(seed));
        Orbit { system, x, rng }
    }

    /// Refresh stream keyed by the starting point, so the orbit is a pure
    /// function of `(system, x)`.
    pub fn from_point(system: &'a dyn DynamicalSystem, x: Point) -> Self {
        let seed = x.bit_hash();
        Self::with_seed(system, x, seed)
    }

    pub fn current(&self) -> &Point {
        &self.x
    }

    pub fn advance(&mut self) -> &Point {
        let mut y = self.system.eval(&self.x);
        if let Some(rng) = self.rng.as_mut() {
            self.system.space().refresh(&self.x, &mut y, rng);
        }
        self.x = y;
        &self.x
    }
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use crate::seed::stream;

    /// Max relative error of the analytic differential against central
    /// differences at `n` seeded random points at distance ≥ `margin` from
    /// the singular set and from circle seams.
    pub fn fd_check(system: &dyn DynamicalSystem, n: usize, seed: u64, margin: f64) -> f64 {
        let mut rng = stream(seed, 0);
        let h = 1e-6;
        let mut worst = 0.0f64;
        let mut done = 0;
        while done < n {
            let x = system.space().sample_uniform(&mut rng);
            if system.distance_to_singular_set(&x) < margin {
                continue;
            }
            let df = system.differential(&x);
            let d = system.dim();
            let fx = system.eval(&x);
            let mut ok = true;
            let mut fd = SquareMatrix::zeros(d);
            for j in 0..d {
                let mut xp = x;
                let mut xm = x;
                xp[j] += h;
                xm[j] -= h;
                let (lo, hi) = system.space().axis(j).bounds();
                if matches!(system.space().axis(j), Axis::Segment { .. }) && (xm[j] < lo || xp[j] > hi) {
                    ok = false;
                    break;
                }
                let fp = system.eval(&xp);
                let fm = system.eval(&xm);
                for i in 0..d {
                    let mut diff = fp[i] - fm[i];
                    if matches!(system.space().axis(i), Axis::Circle) {
                        diff -= diff.round();
                    }
                    // skip stencils straddling a circle seam of the image
                    if matches!(system.space().axis(i), Axis::Circle) && (fx[i] < 1e-4 || fx[i] > 1.0 - 1e-4) {
                        ok = false;
                    }
                    fd[(i, j)] = diff / (2.0 * h);
                }
            }
            if !ok {
                continue;
            }
            let scale = df.max_abs().max(1.0);
            for i in 0..d {
                for j in 0..d {
                    worst = worst.max((fd[(i, j)] - df[(i, j)]).abs() / scale);
                }
            }
            done += 1;
        }
        worst
    }
}
