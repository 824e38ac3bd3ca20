//! Comparator estimators of `d`.

pub mod gs;
pub mod mle;
pub mod pw;

pub use gs::{gs_delta, gs_estimate, gs_fit, GsConfig, GsDesign, GsFit};
pub use mle::{fit_mle, mle_profile_loglik, FixedShort, MleParams};
pub use pw::{fit_pw, fit_pw_known};
