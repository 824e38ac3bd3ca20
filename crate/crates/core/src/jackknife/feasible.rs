//! Iterative feasible jackknife: the weights are built from an estimated
//! model, and the memory estimate used for that model is refined until it
//! settles.

use serde::{Deserialize, Serialize};

use super::covariance::estimator_covariances;
use super::estimate::JackknifeSetup;
use super::plan::SubsamplePlan;
use super::weights::{optimal_weights, JackknifeWeights, Provenance};
use crate::altestimators::gs::{gs_estimate, GsConfig};
use crate::arfima::{frac_diff, ArfimaModel};
use crate::arma::fit_arma_css;
use crate::error::{Error, Result};

/// The model is built with `d` clamped to `[-D_CLAMP, D_CLAMP]` so it stays
/// stationary even when an iterate wanders outside.
pub const D_CLAMP: f64 = 0.49;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IterationConfig {
    /// Tolerance for the first comparison, between the first iterate and the
    /// starting value. `f64::INFINITY` gives a single pass.
    pub tau_initial: f64,
    /// Tolerance for later comparisons between consecutive iterates.
    pub tau: f64,
    pub max_iter: usize,
    /// Starting estimator settings.
    pub gs: GsConfig,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self { tau_initial: 1e-4, tau: 1e-4, max_iter: 20, gs: GsConfig::default() }
    }
}

impl IterationConfig {
    pub fn single_pass() -> Self {
        Self { tau_initial: f64::INFINITY, ..Default::default() }
    }
}

/// One step of the iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationStep {
    pub d_model: f64,
    pub model: ArfimaModel,
    pub weights: JackknifeWeights,
    pub d_jack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleResult {
    pub d: f64,
    pub iterations: usize,
    pub converged: bool,
    pub d_start: f64,
    pub trace: Vec<IterationStep>,
}

/// Model implied by a memory estimate: fractionally difference the demeaned
/// series by `d`, then fit ARMA(p, q) by CSS. With `p = q = 0` the model is
/// fractional noise.
pub fn estimated_model(series: &[f64], d: f64, p: usize, q: usize) -> Result<ArfimaModel> {
    let d = d.clamp(-D_CLAMP, D_CLAMP);
    if p + q == 0 {
        return ArfimaModel::fractional_noise(d);
    }
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let centered: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let fit = fit_arma_css(&frac_diff(&centered, d), p, q)?;
    ArfimaModel::new(d, fit.ar, fit.ma)
}

/// Runs the iteration starting from the GS estimate.
pub fn feasible_jackknife(series: &[f64], plan: &SubsamplePlan, alpha: f64, p: usize, q: usize, cfg: &IterationConfig) -> Result<FeasibleResult> {
    let d_start = gs_estimate(series, &cfg.gs)?;
    feasible_jackknife_from(series, plan, alpha, p, q, cfg, d_start)
}

/// Same as [`feasible_jackknife`] with an explicit starting value.
pub fn feasible_jackknife_from(
    series: &[f64],
    plan: &SubsamplePlan,
    alpha: f64,
    p: usize,
    q: usize,
    cfg: &IterationConfig,
    d_start: f64,
) -> Result<FeasibleResult> {
    if cfg.max_iter == 0 {
        return Err(Error::Config("max_iter must be at least 1".into()));
    }
    let setup = JackknifeSetup::new(plan, alpha)?;
    let (d_full, d_sub) = setup.components(series)?;
    let mut trace = Vec::new();
    let mut d_model = d_start;
    let mut previous = d_start;
    let mut converged = false;
    for k in 1..=cfg.max_iter {
        let model = estimated_model(series, d_model, p, q)?;
        let cov = estimator_covariances(&model, plan.n, plan, alpha)?;
        let mut weights = optimal_weights(plan, alpha, &cov)?;
        weights.provenance = Provenance::FeasibleIteration(k);
        let d_jack = super::estimate::combine(d_full, &d_sub, &weights)?;
        trace.push(IterationStep { d_model, model, weights, d_jack });
        let tol = if k == 1 { cfg.tau_initial } else { cfg.tau };
        if (d_jack - previous).abs() <= tol {
            converged = true;
            break;
        }
        previous = d_jack;
        d_model = d_jack;
    }
    let last = trace.last().expect("at least one iteration");
    Ok(FeasibleResult { d: last.d_jack, iterations: trace.len(), converged, d_start, trace })
}

#[cfg(test)]
mod tests {
    use super::super::plan::Scheme;
    use super::*;
    use crate::arfima::simulate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn single_pass_stops_after_one_iterate() {
        let m = ArfimaModel::new(0.0, vec![0.4], vec![]).unwrap();
        let y = simulate(&m, 192, &mut ChaCha20Rng::seed_from_u64(1)).unwrap();
        let plan = SubsamplePlan::new(Scheme::NonOverlapping, 192, 2).unwrap();
        let r = feasible_jackknife(&y, &plan, 0.65, 1, 0, &IterationConfig::single_pass()).unwrap();
        assert_eq!(r.iterations, 1);
        assert!(r.converged);
        assert_eq!(r.trace[0].weights.provenance, Provenance::FeasibleIteration(1));
    }

    #[test]
    fn iterates_until_settled() {
        let m = ArfimaModel::fractional_noise(0.2).unwrap();
        let y = simulate(&m, 192, &mut ChaCha20Rng::seed_from_u64(2)).unwrap();
        let plan = SubsamplePlan::new(Scheme::MovingBlock, 192, 2).unwrap();
        let r = feasible_jackknife(&y, &plan, 0.65, 0, 0, &IterationConfig::default()).unwrap();
        assert!(r.converged);
        assert!(r.iterations <= 20);
    }
}
