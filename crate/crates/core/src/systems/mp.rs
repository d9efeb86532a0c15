use super::{DynamicalSystem, PhaseSpace, Point, SingularDescriptor, SingularKind};
use crate::error::{Error, Result};
use crate::matrixcore::SquareMatrix;

/// Manneville-Pomeau map on `[0,1]`:
/// `x(1 + 2^α x^α)` on `[0, 1/2]`, `2x - 1` on `(1/2, 1]`.
///
/// For `α > 0` the origin is a neutral fixed point; `α = 0` is the doubling map.
#[derive(Clone, Debug)]
pub struct MannevillePomeau {
    alpha: f64,
    two_alpha: f64,
    space: PhaseSpace,
    singular: Vec<SingularDescriptor>,
}

pub fn make_manneville_pomeau(alpha: f64) -> Result<MannevillePomeau> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidInput(format!("alpha = {alpha} outside [0, 1)")));
    }
    let mut singular = vec![SingularDescriptor::Point {
        at: Point::new(&[0.5]),
        kind: SingularKind::Branch,
    }];
    if alpha > 0.0 {
        singular.push(SingularDescriptor::Point {
            at: Point::new(&[0.0]),
            kind: SingularKind::NeutralFixedPoint,
        });
    }
    Ok(MannevillePomeau {
        alpha,
        two_alpha: 2f64.powf(alpha),
        space: PhaseSpace::unit_interval(),
        singular,
    })
}

impl MannevillePomeau {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Left-branch formula, valid on `[0, 1/2]`.
    pub fn left_branch(&self, x: f64) -> f64 {
        x * (1.0 + self.two_alpha * x.powf(self.alpha))
    }

    pub fn derivative(&self, x: f64) -> f64 {
        if x <= 0.5 {
            1.0 + self.two_alpha * (1.0 + self.alpha) * x.powf(self.alpha)
        } else {
            2.0
        }
    }
}

impl DynamicalSystem for MannevillePomeau {
    fn name(&self) -> &str {
        "mp"
    }

    fn space(&self) -> &PhaseSpace {
        &self.space
    }

    fn params(&self) -> Vec<(String, f64)> {
        vec![("alpha".into(), self.alpha)]
    }

    fn eval(&self, x: &Point) -> Point {
        let v = x[0];
        let y = if v <= 0.5 { self.left_branch(v) } else { 2.0 * v - 1.0 };
        Point::new(&[y.clamp(0.0, 1.0)])
    }

    fn differential(&self, x: &Point) -> SquareMatrix {
        SquareMatrix::diag(&[self.derivative(x[0])]).expect("finite derivative")
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
    fn doubling_endpoint() {
        let f = make_manneville_pomeau(0.0).unwrap();
        assert!((f.eval(&Point::new(&[0.3]))[0] - 0.6).abs() < 1e-15);
        for x in [0.0, 0.1, 0.3, 0.49, 0.51, 0.9] {
            assert_eq!(f.derivative(x), 2.0);
        }
        assert_eq!(f.singular_set().len(), 1);
    }

    #[test]
    fn origin_is_fixed_and_neutral_for_positive_alpha() {
        for a in [0.1, 0.5, 0.9] {
            let f = make_manneville_pomeau(a).unwrap();
            assert_eq!(f.eval(&Point::new(&[0.0]))[0], 0.0);
            assert_eq!(f.derivative(0.0), 1.0);
            assert!(f
                .singular_set()
                .iter()
                .any(|s| s.kind() == SingularKind::NeutralFixedPoint));
        }
        // the doubling map fixes 0 with derivative 2
        let f = make_manneville_pomeau(0.0).unwrap();
        assert_eq!(f.eval(&Point::new(&[0.0]))[0], 0.0);
        assert_eq!(f.derivative(0.0), 2.0);
    }

    #[test]
    fn branch_values_at_half() {
        let f = make_manneville_pomeau(0.5).unwrap();
        assert!((f.left_branch(0.5) - 1.0).abs() < 1e-15);
        assert!((f.eval(&Point::new(&[0.5]))[0] - 1.0).abs() < 1e-15);
        let right = f.eval(&Point::new(&[0.5 + 1e-12]))[0];
        assert!(right.abs() < 1e-11);
    }

    #[test]
    fn rejects_alpha_out_of_range() {
        assert!(make_manneville_pomeau(1.0).is_err());
        assert!(make_manneville_pomeau(-0.1).is_err());
    }

    #[test]
    fn differential_matches_finite_differences() {
        for a in [0.0, 0.3, 0.8] {
            let f = make_manneville_pomeau(a).unwrap();
            assert!(fd_check(&f, 100, 11, 1e-4) < 1e-6);
        }
    }
}
