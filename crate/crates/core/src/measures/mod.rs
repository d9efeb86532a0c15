//! Approximate SRB measures (Birkhoff clouds, Ulam stationary vectors), a
//! weak* proxy distance and the integrability diagnostics.

mod birkhoff;
pub(crate) mod diagnostics;
mod types;
mod ulam;
mod weak_star;

pub use birkhoff::{birkhoff_sample, DEFAULT_BURN_IN, MAX_RESTARTS};
pub use diagnostics::{
    bounded_jacobian_check, holder_parameter_check, ls1_fit, ls2_integral, HolderFit, JacobianBound,
    Ls1Fit, Ls2Integral,
};
pub use types::{EmpiricalMeasure, GridMeasure, Provenance, WeightedMean};
pub use ulam::{ulam_matrix, ulam_stationary, ulam_stationary_from, TransferMatrix, UlamStationary, MAX_CELLS};
pub use weak_star::{test_integrals, weak_star_distance, Measure, DEFAULT_MODES};
