use lpr_jackknife::altestimators::{fit_mle, fit_pw, gs_estimate, GsConfig};
use lpr_jackknife::harness::EstimatorKind;
use lpr_jackknife::jackknife::feasible::estimated_model;
use lpr_jackknife::jackknife::{
    chambers_weights, estimator_covariances, feasible_jackknife, optimal_weights, IterationConfig, JackknifeSetup, Scheme,
    SubsamplePlan,
};
use lpr_jackknife::lpr::lpr_estimate;
use lpr_jackknife::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct EstimateOptions {
    pub estimator: EstimatorKind,
    pub alpha: f64,
    pub m: usize,
    pub scheme: Scheme,
    pub p: usize,
    pub q: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub estimator: String,
    pub n: usize,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub d: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
}

/// Runs one estimator on an observed series. Jackknife estimators that need a
/// model use one fitted from the series.
pub fn estimate(series: &[f64], opts: &EstimateOptions) -> Result<EstimateReport> {
    let n = series.len();
    let mut report = EstimateReport {
        estimator: opts.estimator.to_string(),
        n,
        alpha: opts.alpha,
        scheme: None,
        m: None,
        d: f64::NAN,
        iterations: None,
        converged: None,
    };
    let gs = GsConfig { alpha: opts.alpha, ..GsConfig::default() };
    report.d = match opts.estimator {
        EstimatorKind::Lpr => lpr_estimate(series, opts.alpha)?.d,
        EstimatorKind::Gs => gs_estimate(series, &gs)?,
        EstimatorKind::Mle => fit_mle(series, opts.p, opts.q, None)?.d,
        EstimatorKind::Pw => fit_pw(series, opts.p, opts.q)?,
        kind => {
            if !n.is_multiple_of(opts.m) {
                return Err(Error::Config(format!("series length {n} is not divisible by m = {}", opts.m)));
            }
            let plan = SubsamplePlan::new(opts.scheme, n, opts.m)?;
            report.scheme = Some(opts.scheme.to_string());
            report.m = Some(opts.m);
            let setup = JackknifeSetup::new(&plan, opts.alpha)?;
            match kind {
                EstimatorKind::JackChambers => setup.estimate(series, &chambers_weights(&plan, opts.alpha)?)?.d_jack,
                EstimatorKind::JackOpt => {
                    let model = estimated_model(series, gs_estimate(series, &gs)?, opts.p, opts.q)?;
                    let cov = estimator_covariances(&model, n, &plan, opts.alpha)?;
                    setup.estimate(series, &optimal_weights(&plan, opts.alpha, &cov)?)?.d_jack
                }
                _ => {
                    let cfg = IterationConfig { gs, ..IterationConfig::default() };
                    let r = feasible_jackknife(series, &plan, opts.alpha, opts.p, opts.q, &cfg)?;
                    report.iterations = Some(r.iterations);
                    report.converged = Some(r.converged);
                    r.d
                }
            }
        }
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use lpr_jackknife::arfima::{simulate, ArfimaModel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn every_estimator_runs() {
        let model = ArfimaModel::new(0.2, vec![0.3], vec![]).unwrap();
        let y = simulate(&model, 192, &mut ChaCha20Rng::seed_from_u64(4)).unwrap();
        for estimator in EstimatorKind::ALL {
            let opts = EstimateOptions { estimator, alpha: 0.65, m: 2, scheme: Scheme::MovingBlock, p: 1, q: 0 };
            let r = estimate(&y, &opts).unwrap();
            assert!(r.d.is_finite() && r.d.abs() < 1.5, "{estimator}: {}", r.d);
            assert_eq!(r.m.is_some(), estimator.is_jackknife());
        }
    }

    #[test]
    fn indivisible_length_is_a_config_error() {
        let opts = EstimateOptions { estimator: EstimatorKind::JackChambers, alpha: 0.65, m: 5, scheme: Scheme::NonOverlapping, p: 0, q: 0 };
        assert!(estimate(&vec![0.1; 96], &opts).unwrap_err().is_config());
    }
}
