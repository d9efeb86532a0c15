use crate::error::{Error, Result};
use crate::seed::{derive_seed, stream};
use crate::systems::{DynamicalSystem, Orbit};

use super::types::{EmpiricalMeasure, Provenance};

pub const DEFAULT_BURN_IN: usize = 10_000;
pub const MAX_RESTARTS: usize = 100;

/// Equal-weight cloud of `length` orbit points after `burn_in` steps, from a
/// Lebesgue-uniform start drawn from `seed`. An orbit that lands exactly on
/// the singular set is restarted from a fresh sub-seed.
pub fn birkhoff_sample(
    system: &dyn DynamicalSystem,
    seed: u64,
    burn_in: usize,
    length: usize,
) -> Result<EmpiricalMeasure> {
    if length == 0 {
        return Err(Error::InvalidInput("length must be at least 1".into()));
    }
    let space = system.space();
    'restart: for restart in 0..=MAX_RESTARTS {
        let mut rng = stream(seed, restart as u64);
        let x0 = space.sample_uniform(&mut rng);
        let mut orbit = Orbit::with_seed(system, x0, derive_seed(seed, (1 << 32) + restart as u64));
        for _ in 0..burn_in {
            if system.on_singular_set(orbit.current()) {
                continue 'restart;
            }
            orbit.advance();
        }
        let mut points = Vec::with_capacity(length);
        for _ in 0..length {
            let x = *orbit.current();
            if system.on_singular_set(&x) {
                continue 'restart;
            }
            points.push(x);
            orbit.advance();
        }
        return EmpiricalMeasure::uniform(
            space.clone(),
            points,
            Provenance::Birkhoff {
                seed,
                burn_in,
                length,
                restarts: restart,
            },
        );
    }
    Err(Error::SamplingFailure {
        restarts: MAX_RESTARTS,
        reason: format!("every orbit of {} reached the singular set", system.name()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{cat_map, make_manneville_pomeau, IdentityMap, PhaseSpace, Point, SingularDescriptor, SingularKind};
    use crate::matrixcore::SquareMatrix;

    #[test]
    fn single_point_is_dirac() {
        let m = birkhoff_sample(&cat_map(), 1, 10, 1).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.weights, vec![1.0]);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = birkhoff_sample(&cat_map(), 9, 100, 500).unwrap();
        let b = birkhoff_sample(&cat_map(), 9, 100, 500).unwrap();
        assert_eq!(a, b);
        let c = birkhoff_sample(&cat_map(), 10, 100, 500).unwrap();
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn cat_map_cells_within_three_sigma() {
        let n = 100_000;
        let m = birkhoff_sample(&cat_map(), 2024, 1000, n).unwrap();
        let mut counts = [0usize; 64];
        for p in &m.points {
            let i = (p[0] * 8.0) as usize;
            let j = (p[1] * 8.0) as usize;
            counts[i * 8 + j] += 1;
        }
        let p = 1.0 / 64.0;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        for c in counts {
            let f = c as f64 / n as f64;
            assert!((f - p).abs() <= 3.0 * sigma, "freq {f}");
        }
    }

    #[test]
    fn doubling_map_mean_is_half() {
        let n = 1_000_000;
        let f = make_manneville_pomeau(0.0).unwrap();
        let m = birkhoff_sample(&f, 77, 1000, n).unwrap();
        let mean = m.weighted_mean(|p| Some(p[0])).value;
        let sigma = (1.0f64 / 12.0 / n as f64).sqrt();
        assert!((mean - 0.5).abs() <= 3.0 * sigma, "mean {mean}");
    }

    /// Every point of the space is singular: sampling must give up.
    struct AllSingular(IdentityMap, Vec<SingularDescriptor>);
    impl DynamicalSystem for AllSingular {
        fn name(&self) -> &str { "all-singular" }
        fn space(&self) -> &PhaseSpace { self.0.space() }
        fn params(&self) -> Vec<(String, f64)> { vec![] }
        fn eval(&self, _x: &Point) -> Point { Point::new(&[0.25]) }
        fn differential(&self, _x: &Point) -> SquareMatrix { SquareMatrix::identity(1) }
        fn singular_set(&self) -> &[SingularDescriptor] { &self.1 }
        fn roundoff_refresh(&self) -> bool { false }
    }

    #[test]
    fn persistent_singular_hits_fail() {
        let s = AllSingular(
            IdentityMap::new(PhaseSpace::torus(1)),
            vec![SingularDescriptor::Point { at: Point::new(&[0.25]), kind: SingularKind::Branch }],
        );
        assert!(matches!(birkhoff_sample(&s, 1, 5, 5), Err(Error::SamplingFailure { .. })));
    }
}
