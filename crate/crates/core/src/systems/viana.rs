use std::f64::consts::TAU;

use super::{wrap, DynamicalSystem, PhaseSpace, Point, SingularDescriptor, SingularKind};
use crate::error::{Error, Result};
use crate::matrixcore::SquareMatrix;

pub const DEFAULT_A0: f64 = 1.7808;
pub const DEFAULT_EXPANSION: u32 = 16;

/// Viana-type map `(θ, x) ↦ (dθ mod 1, a₀ + ε sin 2πθ - x²)` on the
/// cylinder `S¹ × [a_min - a_max², a_max]`, `a_max/min = a₀ ± |ε|`.
#[derive(Clone, Debug)]
pub struct Viana {
    a0: f64,
    eps: f64,
    d: u32,
    space: PhaseSpace,
    singular: Vec<SingularDescriptor>,
}

/// Rejects parameters for which the fiber interval is not forward invariant,
/// returning a point whose image leaves it.
pub fn make_viana(a0: f64, eps: f64, d: u32) -> Result<Viana> {
    if d < 16 {
        return Err(Error::InvalidInput(format!("base expansion d = {d} must be at least 16")));
    }
    if !a0.is_finite() || !eps.is_finite() {
        return Err(Error::InvalidInput("a0 and eps must be finite".into()));
    }
    let a_max = a0 + eps.abs();
    let a_min = a0 - eps.abs();
    if a_min <= 0.0 {
        return Err(Error::InvalidInput(format!("a0 - |eps| = {a_min} must be positive")));
    }
    let lo = a_min - a_max * a_max;
    let hi = a_max;
    // f([lo, hi]) ⊂ [a_min - max(lo², hi²), a_max]; invariant iff lo² ≤ hi²
    if lo * lo > hi * hi {
        let theta = if eps >= 0.0 { 0.75 } else { 0.25 };
        return Err(Error::EscapingParameters {
            reason: format!(
                "fiber interval [{lo}, {hi}] is not invariant: image of the left end is {}",
                a_min - lo * lo
            ),
            witness: vec![theta, lo],
        });
    }
    Ok(Viana {
        a0,
        eps,
        d,
        space: PhaseSpace::Cylinder { lo, hi },
        singular: vec![SingularDescriptor::Hyperplane {
            axis: 1,
            value: 0.0,
            kind: SingularKind::Critical,
        }],
    })
}

impl Viana {
    pub fn fiber_interval(&self) -> (f64, f64) {
        self.space.axis(1).bounds()
    }
}

impl DynamicalSystem for Viana {
    fn name(&self) -> &str {
        "viana"
    }

    fn space(&self) -> &PhaseSpace {
        &self.space
    }

    fn params(&self) -> Vec<(String, f64)> {
        vec![
            ("a0".into(), self.a0),
            ("eps".into(), self.eps),
            ("d".into(), self.d as f64),
        ]
    }

    fn eval(&self, p: &Point) -> Point {
        let (theta, x) = (p[0], p[1]);
        let (lo, hi) = self.fiber_interval();
        Point::new(&[
            wrap(self.d as f64 * theta),
            (self.a0 + self.eps * (TAU * theta).sin() - x * x).clamp(lo, hi),
        ])
    }

    fn differential(&self, p: &Point) -> SquareMatrix {
        let mut m = SquareMatrix::zeros(2);
        m[(0, 0)] = self.d as f64;
        m[(1, 0)] = TAU * self.eps * (TAU * p[0]).cos();
        m[(1, 1)] = -2.0 * p[1];
        m
    }

    fn singular_set(&self) -> &[SingularDescriptor] {
        &self.singular
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::testing::fd_check;

    #[test]
    fn decoupled_fiber_at_zero_eps() {
        let v = make_viana(DEFAULT_A0, 0.0, 16).unwrap();
        for x in [-1.0, 0.3, 1.2] {
            let y = v.eval(&Point::new(&[0.37, x]));
            assert!((y[1] - (DEFAULT_A0 - x * x)).abs() < 1e-15);
        }
    }

    #[test]
    fn critical_set_and_base_block() {
        let v = make_viana(DEFAULT_A0, 0.03, 16).unwrap();
        let df = v.differential(&Point::new(&[0.2, 0.0]));
        assert_eq!(df[(1, 1)], 0.0);
        assert_eq!(df[(0, 0)], 16.0);
        assert!(v.on_singular_set(&Point::new(&[0.9, 0.0])));
    }

    #[test]
    fn fiber_interval_invariant() {
        let v = make_viana(DEFAULT_A0, 0.05, 16).unwrap();
        let (lo, hi) = v.fiber_interval();
        for i in 0..=200 {
            for j in 0..=50 {
                let p = Point::new(&[j as f64 / 50.0 % 1.0, lo + (hi - lo) * i as f64 / 200.0]);
                let raw = DEFAULT_A0 + 0.05 * (TAU * p[0]).sin() - p[1] * p[1];
                assert!(raw >= lo - 1e-12 && raw <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn escaping_parameters_rejected_with_witness() {
        match make_viana(1.99, 0.05, 16) {
            Err(Error::EscapingParameters { witness, .. }) => assert_eq!(witness.len(), 2),
            other => panic!("expected rejection, got {other:?}"),
        }
        assert!(make_viana(DEFAULT_A0, 0.01, 8).is_err());
    }

    #[test]
    fn differential_matches_finite_differences() {
        let v = make_viana(DEFAULT_A0, 0.05, 16).unwrap();
        assert!(fd_check(&v, 100, 43, 1e-3) < 1e-6);
    }
}
