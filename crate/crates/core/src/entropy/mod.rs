//! Entropy estimators: Pesin's formula, the exterior-power (Ledrappier-Strelcyn)
//! sequence and the Jacobian along the unstable bundle, with a cross-check.

mod cross;
mod jacobian;
mod ls;

use serde::{Deserialize, Serialize};

use crate::oseledets::LyapunovSpectrum;

pub use cross::{cross_validate, CrossValidateOptions, CrossValidation, Gap};
pub use jacobian::{jacobian_formula_entropy, DEFAULT_TRANSIENT};
pub use ls::{exponent_function, ls_sequence, wedge_table, LsSequence, WedgeTable, DEFAULT_NMAX, EARLY_STOP_DROP, EARLY_STOP_WINDOW, MAX_NMAX};

/// Fraction of measure points allowed to fail before an estimator gives up.
pub const FAILURE_LIMIT: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "pesin")]
    Pesin,
    #[serde(rename = "ledrappier_strelcyn")]
    LedrappierStrelcyn,
    #[serde(rename = "jacobian_F")]
    JacobianF,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Pesin => "pesin",
            Method::LedrappierStrelcyn => "ledrappier_strelcyn",
            Method::JacobianF => "jacobian_F",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Diagnostics {
    Pesin {
        exponents: Vec<f64>,
        positive: usize,
        n_steps: usize,
    },
    Ls(LsSequence),
    Jacobian {
        dim_f: usize,
        n_transient: usize,
        points: usize,
        skipped: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub method: Method,
    /// Nats per iteration.
    pub value: f64,
    pub std_error: f64,
    pub diagnostics: Diagnostics,
}

/// `Σ max(λᵢ, 0)`, errors added in quadrature over the positive exponents.
pub fn pesin_entropy(spectrum: &LyapunovSpectrum) -> EntropyEstimate {
    let pos: Vec<usize> = (0..spectrum.dim()).filter(|&i| spectrum.exponents[i] > 0.0).collect();
    let value = pos.iter().map(|&i| spectrum.exponents[i]).sum();
    let var: f64 = pos.iter().map(|&i| spectrum.std_error[i].powi(2)).sum();
    EntropyEstimate {
        method: Method::Pesin,
        value,
        std_error: var.sqrt(),
        diagnostics: Diagnostics::Pesin {
            exponents: spectrum.exponents.clone(),
            positive: pos.len(),
            n_steps: spectrum.n_steps,
        },
    }
}
