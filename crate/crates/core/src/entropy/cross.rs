use serde::{Deserialize, Serialize};

use super::{jacobian_formula_entropy, pesin_entropy, wedge_table, EntropyEstimate, Method, DEFAULT_NMAX, DEFAULT_TRANSIENT};
use crate::error::Result;
use crate::measures::EmpiricalMeasure;
use crate::oseledets::{benettin_spectrum, DEFAULT_BLOCKS};
use crate::systems::DynamicalSystem;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossValidateOptions {
    pub dim_f: usize,
    pub n_max: usize,
    pub tol: f64,
    pub n_transient: usize,
    /// Spectrum run for the Pesin estimate.
    pub seed: u64,
    pub burn_in: usize,
    pub n_steps: usize,
    pub blocks: usize,
}

impl CrossValidateOptions {
    pub fn new(dim_f: usize) -> Self {
        CrossValidateOptions {
            dim_f,
            n_max: DEFAULT_NMAX,
            tol: 0.02,
            n_transient: DEFAULT_TRANSIENT,
            seed: 0,
            burn_in: 1000,
            n_steps: 100_000,
            blocks: DEFAULT_BLOCKS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub a: Method,
    pub b: Method,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub estimates: Vec<EntropyEstimate>,
    pub gaps: Vec<Gap>,
    pub tol: f64,
    pub sinai_consistent: bool,
    /// The exterior-power bound exceeds the Pesin value by more than
    /// `tol + 2·(combined standard error)`.
    pub ruelle_violated: bool,
}

impl CrossValidation {
    pub fn from_estimates(pesin: EntropyEstimate, ls: EntropyEstimate, jacobian: EntropyEstimate, tol: f64) -> Self {
        let estimates = vec![pesin, ls, jacobian];
        let mut gaps = Vec::new();
        for i in 0..3 {
            for j in i + 1..3 {
                gaps.push(Gap {
                    a: estimates[i].method,
                    b: estimates[j].method,
                    gap: (estimates[i].value - estimates[j].value).abs(),
                });
            }
        }
        let sinai_consistent = gaps.iter().all(|g| g.gap <= tol);
        let (p, l) = (&estimates[0], &estimates[1]);
        let combined = p.std_error.hypot(l.std_error);
        let ruelle_violated = l.value - p.value > tol + 2.0 * combined;
        CrossValidation { estimates, gaps, tol, sinai_consistent, ruelle_violated }
    }

    pub fn get(&self, m: Method) -> &EntropyEstimate {
        self.estimates.iter().find(|e| e.method == m).expect("all three methods present")
    }
}

/// Runs all three estimators and compares them.
pub fn cross_validate(
    system: &dyn DynamicalSystem,
    measure: &EmpiricalMeasure,
    opts: &CrossValidateOptions,
) -> Result<CrossValidation> {
    let spectrum = benettin_spectrum(system, opts.seed, opts.burn_in, opts.n_steps, opts.blocks)?;
    let pesin = pesin_entropy(&spectrum);
    let ls = wedge_table(system, measure, opts.n_max)?.ls().estimate();
    let jac = jacobian_formula_entropy(system, measure, opts.dim_f, opts.n_transient, opts.seed)?;
    Ok(CrossValidation::from_estimates(pesin, ls, jac, opts.tol))
}
