//! Jackknife bias correction of the LPR estimate.

pub mod covariance;
pub mod estimate;
pub mod feasible;
pub mod plan;
pub mod weights;

pub use covariance::{
    estimator_covariances, estimator_covariances_with, periodogram_correlation, CovarianceBundle, CovarianceCache,
    CovarianceOptions,
};
pub use estimate::{jackknife_estimate, JackknifeDetail, JackknifeSetup};
pub use feasible::{feasible_jackknife, FeasibleResult, IterationConfig};
pub use plan::{subsample, Scheme, SubsamplePlan};
pub use weights::{bordered_hessian_minors, chambers_weights, optimal_weights, JackknifeWeights, Provenance};
