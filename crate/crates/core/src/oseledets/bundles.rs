use rand::Rng as _;

use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::matrixcore::{Frame, FramePropagator, SquareMatrix};
use crate::seed::{derive_seed, stream};
use crate::systems::{DynamicalSystem, Point};

/// Estimated `E ⊕ F` at a list of base points.
#[derive(Clone, Debug, PartialEq)]
pub struct SplittingEstimate {
    pub points: Vec<Point>,
    pub e_frames: Vec<Frame>,
    pub f_frames: Vec<Frame>,
    pub dim_e: usize,
    pub dim_f: usize,
}

impl SplittingEstimate {
    /// The same estimate with the roles of `E` and `F` exchanged.
    pub fn swapped(&self) -> Self {
        SplittingEstimate {
            points: self.points.clone(),
            e_frames: self.f_frames.clone(),
            f_frames: self.e_frames.clone(),
            dim_e: self.dim_f,
            dim_f: self.dim_e,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn random_frame(dim: usize, rank: usize, seed: u64) -> Frame {
    let mut rng = stream(seed, 0);
    let mut m = SquareMatrix::zeros(dim);
    for j in 0..rank {
        for i in 0..dim {
            m[(i, j)] = rng.gen_range(-1.0..1.0);
        }
    }
    Frame::new(m, rank)
}

fn check_dims(system: &dyn DynamicalSystem, dim_f: usize) -> Result<usize> {
    let d = system.dim();
    if dim_f == 0 || dim_f > d {
        return Err(Error::InvalidInput(format!("dim F must lie in [1, {d}], got {dim_f}")));
    }
    Ok(d)
}

fn orbit_failure(step: usize, reason: impl Into<String>) -> Error {
    Error::OrbitFailure { step, reason: reason.into() }
}

fn checked_df(system: &dyn DynamicalSystem, x: &Point, step: usize) -> Result<SquareMatrix> {
    if system.on_singular_set(x) {
        return Err(orbit_failure(step, format!("orbit reached the singular set at {:?}", x.as_slice())));
    }
    let df = system.differential(x);
    df.check_finite().map_err(|e| orbit_failure(step, e.to_string()))?;
    Ok(df)
}

fn push_along(frame: &Frame, mats: impl Iterator<Item = Result<SquareMatrix>>) -> Result<Frame> {
    let mut p = FramePropagator::new(frame)?;
    for (k, m) in mats.enumerate() {
        p.push(&m?).map_err(|e| orbit_failure(k, e.to_string()))?;
    }
    Ok(*p.frame())
}

/// `F` at `x`: a random `dim_f`-frame pushed forward along the backward
/// pseudo-orbit of `x` for invertible systems. For non-invertible systems
/// there is no past, and the frame is pushed along the forward orbit, so the
/// returned anchor is `f^n(x)` rather than `x`.
pub fn estimate_unstable_bundle(
    system: &dyn DynamicalSystem,
    x: &Point,
    dim_f: usize,
    n_transient: usize,
    seed: u64,
) -> Result<(Point, Frame)> {
    let d = check_dims(system, dim_f)?;
    if dim_f == d {
        return Ok((*x, Frame::standard(d, d)));
    }
    let start = random_frame(d, dim_f, seed);
    if system.is_invertible() {
        let mut past = Vec::with_capacity(n_transient);
        let mut y = *x;
        for k in 0..n_transient {
            y = system
                .inverse_eval(&y)
                .ok_or_else(|| orbit_failure(k, "inverse not available"))?;
            past.push(y);
        }
        let f = push_along(
            &start,
            past.iter().rev().enumerate().map(|(k, p)| checked_df(system, p, k)),
        )?;
        Ok((*x, f))
    } else {
        let mut pts = Vec::with_capacity(n_transient);
        let mut y = *x;
        for _ in 0..n_transient {
            pts.push(y);
            y = system.eval(&y);
        }
        let f = push_along(&start, pts.iter().enumerate().map(|(k, p)| checked_df(system, p, k)))?;
        Ok((y, f))
    }
}

/// `E ⊕ F` at `x`. `E` is a random complementary frame pulled back along the
/// forward orbit with inverse differentials, so it needs an invertible system
/// whenever `dim E > 0`.
pub fn estimate_bundles(
    system: &dyn DynamicalSystem,
    x: &Point,
    dim_f: usize,
    n_transient: usize,
    seed: u64,
) -> Result<SplittingEstimate> {
    let d = check_dims(system, dim_f)?;
    let dim_e = d - dim_f;
    if dim_e > 0 && !system.is_invertible() {
        return Err(Error::Unsupported(format!(
            "{} is not invertible: the E bundle (dim {dim_e}) needs backward iteration",
            system.name()
        )));
    }
    let (_, f) = estimate_unstable_bundle(system, x, dim_f, n_transient, derive_seed(seed, 0))?;
    let e = if dim_e == 0 {
        Frame::empty(d)
    } else {
        let mut pts = Vec::with_capacity(n_transient);
        let mut y = *x;
        for _ in 0..n_transient {
            pts.push(y);
            y = system.eval(&y);
        }
        let start = random_frame(d, dim_e, derive_seed(seed, 1));
        push_along(
            &start,
            pts.iter().rev().enumerate().map(|(k, p)| {
                checked_df(system, p, k)?
                    .inverse()
                    .ok_or_else(|| orbit_failure(k, "singular differential"))
            }),
        )?
    };
    Ok(SplittingEstimate {
        points: vec![*x],
        e_frames: vec![e],
        f_frames: vec![f],
        dim_e,
        dim_f,
    })
}

/// [`estimate_bundles`] at every point, in parallel; point `i` uses seed
/// `derive_seed(seed, i)`.
pub fn estimate_splitting(
    system: &dyn DynamicalSystem,
    points: &[Point],
    dim_f: usize,
    n_transient: usize,
    seed: u64,
) -> Result<SplittingEstimate> {
    let d = check_dims(system, dim_f)?;
    let parts = map_indexed(points.len(), |i| {
        estimate_bundles(system, &points[i], dim_f, n_transient, derive_seed(seed, i as u64))
    });
    let mut out = SplittingEstimate {
        points: Vec::with_capacity(points.len()),
        e_frames: Vec::with_capacity(points.len()),
        f_frames: Vec::with_capacity(points.len()),
        dim_e: d - dim_f,
        dim_f,
    };
    for p in parts {
        let p = p?;
        out.points.extend(p.points);
        out.e_frames.extend(p.e_frames);
        out.f_frames.extend(p.f_frames);
    }
    Ok(out)
}

/// Volume expansion of `Df(x)` on `span(F)`: `√det(GᵀG)` with `G = Df(x)·F`.
pub fn jacobian_along_f(system: &dyn DynamicalSystem, x: &Point, f_frame: &Frame) -> Result<f64> {
    if f_frame.dim() != system.dim() {
        return Err(Error::DimensionMismatch { expected: system.dim(), got: f_frame.dim() });
    }
    if f_frame.rank == 0 || f_frame.orthonormality_defect() > 1e-8 {
        return Err(Error::InvalidInput("F frame must be non-empty and orthonormal".into()));
    }
    let g = f_frame.pushed(&system.differential(x));
    Ok(g.singular_values().iter().product())
}
