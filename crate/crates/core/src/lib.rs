//! Log-periodogram estimation of the long-memory parameter `d` of ARFIMA
//! processes, with jackknife bias correction by optimally weighted
//! sub-samples, comparator estimators, and a Monte Carlo harness.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod altestimators;
pub mod arfima;
pub mod arma;
pub mod error;
pub mod harness;
pub mod jackknife;
pub mod lpr;
pub mod optim;
pub mod quad;
pub mod specfun;
pub mod spectral;
pub mod toeplitz;

pub use arfima::ArfimaModel;
pub use error::{Error, Result};
