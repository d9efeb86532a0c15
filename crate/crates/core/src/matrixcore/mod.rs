//! Small dense linear algebra for tangent cocycles: singular values,
//! exterior-power norms and overflow-safe products.

mod cocycle;
mod dd;
mod matrix;
mod qr;
mod svd;
mod wedge;

pub use cocycle::CocycleAccumulator;
pub use matrix::{SquareMatrix, MAX_DIM};
pub use qr::{orthonormalize, Frame, FramePropagator};
pub use svd::{singular_values, singular_values_of_columns, top_singular_value_of_columns};
pub use wedge::{
    cocycle_wedge_series, compound, exact_cocycle_wedge, log_sum_exp_with_one, wedge_profile,
    WedgeProfile, LOG_ZERO,
};
