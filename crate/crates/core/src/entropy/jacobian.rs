use super::{Diagnostics, EntropyEstimate, Method, FAILURE_LIMIT};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, tree_sum, CHUNK};
use crate::measures::EmpiricalMeasure;
use crate::oseledets::{estimate_unstable_bundle, jacobian_along_f};
use crate::seed::derive_seed;
use crate::systems::DynamicalSystem;

pub const DEFAULT_TRANSIENT: usize = 40;

/// `∫log Jf_F dμ` with `F` re-estimated at every measure point (point `i`
/// draws its random frame from `derive_seed(seed, i)`).
pub fn jacobian_formula_entropy(
    system: &dyn DynamicalSystem,
    measure: &EmpiricalMeasure,
    dim_f: usize,
    n_transient: usize,
    seed: u64,
) -> Result<EntropyEstimate> {
    if measure.space != *system.space() {
        return Err(Error::InvalidInput("measure and system live on different spaces".into()));
    }
    if dim_f == 0 || dim_f > system.dim() {
        return Err(Error::InvalidInput(format!("dim F must lie in [1, {}], got {dim_f}", system.dim())));
    }
    let npts = measure.len();
    let chunks = map_indexed(npts.div_ceil(CHUNK), |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(npts);
        let (mut w, mut s1, mut s2, mut failed) = (Vec::new(), Vec::new(), Vec::new(), 0usize);
        for i in lo..hi {
            let v = estimate_unstable_bundle(system, &measure.points[i], dim_f, n_transient, derive_seed(seed, i as u64))
                .and_then(|(anchor, f)| {
                    if system.on_singular_set(&anchor) {
                        return Err(Error::OrbitFailure { step: n_transient, reason: "anchor on the singular set".into() });
                    }
                    jacobian_along_f(system, &anchor, &f)
                });
            match v {
                Ok(j) if j > 0.0 && j.is_finite() => {
                    let l = j.ln();
                    let wi = measure.weights[i];
                    w.push(wi);
                    s1.push(wi * l);
                    s2.push(wi * l * l);
                }
                Ok(_) | Err(Error::OrbitFailure { .. }) => failed += 1,
                Err(e) => return Err(e),
            }
        }
        Ok((tree_sum(&w), tree_sum(&s1), tree_sum(&s2), failed))
    });
    let chunks = chunks.into_iter().collect::<Result<Vec<_>>>()?;
    let skipped: usize = chunks.iter().map(|c| c.3).sum();
    if skipped as f64 > FAILURE_LIMIT * npts as f64 || skipped == npts {
        return Err(Error::TooManyFailures { failed: skipped, total: npts, limit_pct: 100.0 * FAILURE_LIMIT });
    }
    let sum = |k: usize| {
        tree_sum(
            &chunks
                .iter()
                .map(|c| match k {
                    0 => c.0,
                    1 => c.1,
                    _ => c.2,
                })
                .collect::<Vec<_>>(),
        )
    };
    let w = sum(0);
    let mean = sum(1) / w;
    let sd = (sum(2) / w - mean * mean).max(0.0).sqrt();
    Ok(EntropyEstimate {
        method: Method::JacobianF,
        value: mean.max(0.0),
        std_error: sd / ((npts - skipped) as f64).sqrt(),
        diagnostics: Diagnostics::Jacobian { dim_f, n_transient, points: npts, skipped },
    })
}
