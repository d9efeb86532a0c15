use super::{wrap, DynamicalSystem, PhaseSpace, Point};
use crate::error::{Error, Result};
use crate::matrixcore::SquareMatrix;

/// Linear automorphism `x ↦ A x mod 1` of the torus, `A` integer with `|det A| = 1`.
#[derive(Clone, Debug)]
pub struct TorusAutomorphism {
    name: String,
    space: PhaseSpace,
    matrix: SquareMatrix,
    inverse: SquareMatrix,
}

pub fn cat_matrix() -> SquareMatrix {
    SquareMatrix::from_rows(&[[2.0, 1.0], [1.0, 1.0]]).expect("static matrix")
}

/// Arnold's cat map.
pub fn cat_map() -> TorusAutomorphism {
    let mut t = make_torus_automorphism(&cat_matrix()).expect("unimodular");
    t.name = "cat".into();
    t
}

pub fn make_torus_automorphism(matrix: &SquareMatrix) -> Result<TorusAutomorphism> {
    matrix.check_finite()?;
    let d = matrix.dim();
    for i in 0..d {
        for j in 0..d {
            if matrix[(i, j)].fract() != 0.0 {
                return Err(Error::InvalidInput(format!(
                    "entry ({i},{j}) = {} is not an integer",
                    matrix[(i, j)]
                )));
            }
        }
    }
    let det = matrix.det();
    if (det.abs() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("|det| = {} but must be 1", det.abs())));
    }
    let inv = matrix
        .inverse()
        .ok_or_else(|| Error::InvalidInput("singular matrix".into()))?;
    // unimodular integer matrices have integer inverses
    let inverse = SquareMatrix::from_fn(d, |i, j| inv[(i, j)].round());
    Ok(TorusAutomorphism {
        name: "torus".into(),
        space: PhaseSpace::torus(d),
        matrix: *matrix,
        inverse,
    })
}

fn act(m: &SquareMatrix, x: &Point) -> Point {
    let d = m.dim();
    let mut y = Point::zeros(d);
    for i in 0..d {
        let mut s = 0.0;
        for j in 0..d {
            s += m[(i, j)] * x[j];
        }
        y[i] = wrap(s);
    }
    y
}

impl TorusAutomorphism {
    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }
}

impl DynamicalSystem for TorusAutomorphism {
    fn name(&self) -> &str {
        &self.name
    }

    fn space(&self) -> &PhaseSpace {
        &self.space
    }

    fn params(&self) -> Vec<(String, f64)> {
        self.matrix
            .row_major()
            .into_iter()
            .enumerate()
            .map(|(k, v)| (format!("a{k}"), v))
            .collect()
    }

    fn eval(&self, x: &Point) -> Point {
        act(&self.matrix, x)
    }

    fn differential(&self, _x: &Point) -> SquareMatrix {
        self.matrix
    }

    fn is_invertible(&self) -> bool {
        true
    }

    fn inverse_eval(&self, x: &Point) -> Option<Point> {
        Some(act(&self.inverse, x))
    }

    fn inverse_differential(&self, _x: &Point) -> Option<SquareMatrix> {
        Some(self.inverse)
    }
}
