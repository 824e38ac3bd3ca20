use super::plan::SubsamplePlan;
use super::weights::JackknifeWeights;
use crate::error::{Error, Result};
use crate::lpr::LprPlan;

/// Full-sample and sub-sample estimates behind one jackknife value.
#[derive(Debug, Clone, PartialEq)]
pub struct JackknifeDetail {
    pub d_full: f64,
    pub d_sub: Vec<f64>,
    pub d_jack: f64,
}

/// Precomputed LPR plans for a full sample and its sub-samples.
#[derive(Debug, Clone)]
pub struct JackknifeSetup {
    pub plan: SubsamplePlan,
    pub full: LprPlan,
    pub sub: LprPlan,
}

impl JackknifeSetup {
    pub fn new(plan: &SubsamplePlan, alpha: f64) -> Result<Self> {
        Ok(Self { plan: plan.clone(), full: LprPlan::new(plan.n, alpha)?, sub: LprPlan::new(plan.l, alpha)? })
    }

    /// Full-sample estimate and one estimate per sub-sample.
    pub fn components(&self, series: &[f64]) -> Result<(f64, Vec<f64>)> {
        if series.len() != self.plan.n {
            return Err(Error::LengthMismatch { expected: self.plan.n, got: series.len() });
        }
        let d_full = self.full.estimate(series)?.d;
        let d_sub = (0..self.plan.m)
            .map(|i| {
                self.sub
                    .estimate(self.plan.block(series, i))
                    .map(|e| e.d)
                    .map_err(|e| Error::Subsample { index: i + 1, source: Box::new(e) })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((d_full, d_sub))
    }

    pub fn estimate(&self, series: &[f64], weights: &JackknifeWeights) -> Result<JackknifeDetail> {
        let (d_full, d_sub) = self.components(series)?;
        Ok(JackknifeDetail { d_jack: combine(d_full, &d_sub, weights)?, d_full, d_sub })
    }
}

/// `w_n d_full - sum w_i d_i`.
pub fn combine(d_full: f64, d_sub: &[f64], weights: &JackknifeWeights) -> Result<f64> {
    if d_sub.len() != weights.w_sub.len() {
        return Err(Error::LengthMismatch { expected: weights.w_sub.len(), got: d_sub.len() });
    }
    Ok(weights.w_n * d_full - weights.w_sub.iter().zip(d_sub).map(|(w, d)| w * d).sum::<f64>())
}

/// Jackknife estimate `w_n d_n - sum w_i d_i` with LPR on the full series and
/// on each sub-sample.
pub fn jackknife_estimate(series: &[f64], plan: &SubsamplePlan, weights: &JackknifeWeights, alpha: f64) -> Result<f64> {
    Ok(JackknifeSetup::new(plan, alpha)?.estimate(series, weights)?.d_jack)
}
