//! Numerical ergodic theory for smooth maps: Lyapunov spectra, SRB measure
//! approximation, three entropy estimators and parameter sweeps.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entropy;
pub mod error;
pub mod exec;
pub mod io;
pub mod matrixcore;
pub mod measures;
pub mod oseledets;
pub mod seed;
pub mod sweep;
pub mod systems;

pub use error::{Error, Result};
