use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrixcore::CocycleAccumulator;
use crate::seed::{derive_seed, stream};
use crate::systems::{DynamicalSystem, Orbit};

pub const DEFAULT_BLOCKS: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSpectrum {
    /// Descending, nats per iteration.
    pub exponents: Vec<f64>,
    pub n_steps: usize,
    /// Standard error of each exponent from the spread of block rates.
    pub std_error: Vec<f64>,
    /// Time average of `log|det Df|` along the same orbit.
    pub mean_log_det: f64,
}

impl LyapunovSpectrum {
    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn sum(&self) -> f64 {
        self.exponents.iter().sum()
    }
}

/// QR (Benettin) spectrum along one orbit started Lebesgue-uniformly from
/// `seed`. The frame is aligned during `burn_in`; the `n_steps` counted steps
/// are cut into `blocks` contiguous segments for the error estimate.
pub fn benettin_spectrum(
    system: &dyn DynamicalSystem,
    seed: u64,
    burn_in: usize,
    n_steps: usize,
    blocks: usize,
) -> Result<LyapunovSpectrum> {
    let d = system.dim();
    if n_steps < 10 * d {
        return Err(Error::InvalidInput(format!("n_steps must be at least {} (10·dim)", 10 * d)));
    }
    if blocks < 2 || blocks > n_steps {
        return Err(Error::InvalidInput(format!("blocks must lie in [2, {n_steps}]")));
    }
    let mut rng = stream(seed, 0);
    let x0 = system.space().sample_uniform(&mut rng);
    let mut orbit = Orbit::with_seed(system, x0, derive_seed(seed, 1 << 32));
    let mut acc = CocycleAccumulator::new(d);
    let mut step = |acc: &mut CocycleAccumulator, k: usize| -> Result<f64> {
        let x = *orbit.current();
        if system.on_singular_set(&x) {
            return Err(Error::OrbitFailure {
                step: k,
                reason: format!("orbit reached the singular set at {:?}", x.as_slice()),
            });
        }
        let df = system.differential(&x);
        acc.step(&df).map_err(|e| match e {
            Error::OrbitFailure { reason, .. } => Error::OrbitFailure { step: k, reason },
            other => Error::OrbitFailure { step: k, reason: other.to_string() },
        })?;
        orbit.advance();
        Ok(df.log_abs_det().1)
    };
    for k in 0..burn_in {
        step(&mut acc, k)?;
    }
    let mut prev = acc.log_diag().to_vec();
    let base = prev.clone();
    let mut log_det = Vec::with_capacity(blocks);
    let mut block_rates = Vec::with_capacity(blocks);
    let mut k = burn_in;
    for b in 0..blocks {
        let len = n_steps / blocks + usize::from(b < n_steps % blocks);
        let mut ld = 0.0;
        for _ in 0..len {
            ld += step(&mut acc, k)?;
            k += 1;
        }
        log_det.push(ld);
        let now = acc.log_diag().to_vec();
        block_rates.push(now.iter().zip(&prev).map(|(a, p)| (a - p) / len as f64).collect::<Vec<f64>>());
        prev = now;
    }
    let n = n_steps as f64;
    let raw: Vec<f64> = prev.iter().zip(&base).map(|(a, b)| (a - b) / n).collect();
    let bf = blocks as f64;
    let se: Vec<f64> = (0..d)
        .map(|i| {
            let mean = block_rates.iter().map(|r| r[i]).sum::<f64>() / bf;
            let var = block_rates.iter().map(|r| (r[i] - mean).powi(2)).sum::<f64>() / (bf - 1.0);
            (var / bf).sqrt()
        })
        .collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| raw[b].total_cmp(&raw[a]));
    Ok(LyapunovSpectrum {
        exponents: order.iter().map(|&i| raw[i]).collect(),
        n_steps,
        std_error: order.iter().map(|&i| se[i]).collect(),
        mean_log_det: log_det.iter().sum::<f64>() / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixcore::SquareMatrix;
    use crate::systems::{cat_map, cat_matrix, make_manneville_pomeau, make_torus_automorphism};

    const LOG_LAMBDA: f64 = 0.962_423_650_119_206_9;

    #[test]
    fn cat_map_spectrum() {
        let s = benettin_spectrum(&cat_map(), 1, 100, 100_000, 10).unwrap();
        assert!((s.exponents[0] - LOG_LAMBDA).abs() < 1e-6);
        assert!((s.exponents[1] + LOG_LAMBDA).abs() < 1e-6);
        assert!(s.std_error.iter().all(|e| *e < 1e-9));
    }

    #[test]
    fn direct_sum_spectrum() {
        let a = cat_matrix();
        let sys = make_torus_automorphism(&SquareMatrix::block_diag(&a, &a).unwrap()).unwrap();
        let s = benettin_spectrum(&sys, 3, 100, 100_000, 10).unwrap();
        let want = [LOG_LAMBDA, LOG_LAMBDA, -LOG_LAMBDA, -LOG_LAMBDA];
        for (g, w) in s.exponents.iter().zip(want) {
            assert!((g - w).abs() < 1e-5, "{:?}", s.exponents);
        }
    }

    #[test]
    fn doubling_map() {
        let s = benettin_spectrum(&make_manneville_pomeau(0.0).unwrap(), 5, 100, 10_000, 10).unwrap();
        assert!((s.exponents[0] - std::f64::consts::LN_2).abs() < 1e-3);
    }

    #[test]
    fn sum_matches_log_det_average() {
        let da = crate::systems::make_derived_from_anosov(0.4).unwrap();
        let s = benettin_spectrum(&da, 11, 1000, 50_000, 5).unwrap();
        assert!((s.sum() - s.mean_log_det).abs() < 1e-8);
        assert!(s.exponents.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rejects_short_runs() {
        assert!(benettin_spectrum(&cat_map(), 1, 0, 19, 2).is_err());
        assert!(benettin_spectrum(&cat_map(), 1, 0, 100, 1).is_err());
    }

    #[test]
    fn deterministic() {
        let a = benettin_spectrum(&cat_map(), 4, 10, 1000, 4).unwrap();
        let b = benettin_spectrum(&cat_map(), 4, 10, 1000, 4).unwrap();
        assert_eq!(a, b);
    }
}
