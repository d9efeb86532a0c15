use super::{DynamicalSystem, PhaseSpace, Point};
use crate::matrixcore::SquareMatrix;

/// The identity map on a phase space.
#[derive(Clone, Debug)]
pub struct IdentityMap {
    space: PhaseSpace,
}

impl IdentityMap {
    pub fn new(space: PhaseSpace) -> Self {
        IdentityMap { space }
    }
}

impl DynamicalSystem for IdentityMap {
    fn name(&self) -> &str {
        "identity"
    }

    fn space(&self) -> &PhaseSpace {
        &self.space
    }

    fn params(&self) -> Vec<(String, f64)> {
        vec![("dim".into(), self.space.dim() as f64)]
    }

    fn eval(&self, x: &Point) -> Point {
        *x
    }

    fn differential(&self, _x: &Point) -> SquareMatrix {
        SquareMatrix::identity(self.space.dim())
    }

    fn is_invertible(&self) -> bool {
        true
    }

    fn inverse_eval(&self, x: &Point) -> Option<Point> {
        Some(*x)
    }

    fn roundoff_refresh(&self) -> bool {
        false
    }
}
