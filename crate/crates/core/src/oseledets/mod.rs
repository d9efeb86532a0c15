//! Lyapunov spectra, estimates of the invariant splitting `E ⊕ F`, domination
//! reports and Jacobians along `F`.

mod bundles;
mod domination;
mod spectrum;

pub use bundles::{estimate_bundles, estimate_splitting, estimate_unstable_bundle, jacobian_along_f, SplittingEstimate};
pub use domination::{domination_report, DominationReport, Verdict, DEFAULT_N_GRID, RESIDUAL_THRESHOLD, RHO_THRESHOLD};
pub use spectrum::{benettin_spectrum, LyapunovSpectrum, DEFAULT_BLOCKS};
