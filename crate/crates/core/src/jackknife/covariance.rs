//! Covariances between full-sample and sub-sample LPR estimates, built from the
//! finite-sample correlation of periodogram ordinates.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use super::plan::{Scheme, SubsamplePlan};
use crate::arfima::{spectral_density, ArfimaModel};
use crate::error::{Error, Result};
use crate::specfun::{dirichlet_abs2_unchecked, log_periodogram_cov, SeriesControl};
use crate::spectral::{LprRegressors, SpectralGrid};

/// Upper clip applied to correlations before they enter the log-covariance
/// series, which needs `rho^2 < 1`.
pub const RHO_CAP: f64 = 1.0 - 1e-9;

/// Correlation of periodogram ordinates at `lambda` and `mu` for sub-samples of
/// length `l`, before clipping.
pub fn periodogram_correlation_raw(model: &ArfimaModel, l: usize, lambda: f64, mu: f64) -> Result<f64> {
    if l < 2 || !(lambda > 0.0 && lambda <= std::f64::consts::PI) || !(mu > 0.0 && mu <= std::f64::consts::PI) {
        return Err(Error::Domain(format!("periodogram_correlation needs l >= 2 and frequencies in (0, pi], got l = {l}, {lambda}, {mu}")));
    }
    let ratio = spectral_density(model, lambda)? / spectral_density(model, mu)?;
    Ok(correlation_with_ratio(l, lambda, mu, ratio))
}

fn correlation_with_ratio(l: usize, lambda: f64, mu: f64, f_ratio: f64) -> f64 {
    let lf = l as f64;
    let l2 = lf * lf;
    let a = 3.0 / lf;
    let num = a + (dirichlet_abs2_unchecked(l, mu - lambda) + dirichlet_abs2_unchecked(l, lambda + mu)) / l2 * f_ratio;
    let den = ((1.0 + a + dirichlet_abs2_unchecked(l, 2.0 * lambda) / l2) * (1.0 + a + dirichlet_abs2_unchecked(l, 2.0 * mu) / l2)).sqrt();
    num / den
}

/// Clips a correlation into `[0, RHO_CAP]`, reporting whether it moved.
pub fn clip_rho(rho: f64) -> (f64, bool) {
    if rho > RHO_CAP {
        (RHO_CAP, true)
    } else if rho < 0.0 {
        (0.0, true)
    } else {
        (rho, false)
    }
}

/// Clipped periodogram correlation.
pub fn periodogram_correlation(model: &ArfimaModel, l: usize, lambda: f64, mu: f64) -> Result<f64> {
    Ok(clip_rho(periodogram_correlation_raw(model, l, lambda, mu)?).0)
}

/// Counters collected while evaluating the covariance double sums.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CovarianceDiagnostics {
    pub clip_events: usize,
    pub truncated_series: usize,
    pub max_terms: usize,
}

/// `c*_{n,i}` for each sub-sample and the matrix `c+_{i,j}` (diagonal unused).
///
/// The correlation formula carries no sub-sample phase, so every `c*_{n,i}` and
/// every off-diagonal `c+_{i,j}` share one value, and the result does not
/// depend on the sub-sampling scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceBundle {
    pub c_star: Vec<f64>,
    pub c_dagger: Vec<Vec<f64>>,
    pub model_used: ArfimaModel,
    pub plan: SubsamplePlan,
    pub alpha: f64,
    pub diagnostics: CovarianceDiagnostics,
}

impl CovarianceBundle {
    /// Copy with every covariance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.c_star.iter_mut().for_each(|c| *c *= factor);
        out.c_dagger.iter_mut().flatten().for_each(|c| *c *= factor);
        out
    }
}

/// Knobs for [`estimator_covariances_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct CovarianceOptions {
    pub series: SeriesControl,
    /// Replace every correlation by this value (diagnostic hook).
    pub rho_override: Option<f64>,
}

struct Accumulator<'a> {
    ctl: SeriesControl,
    diag: &'a mut CovarianceDiagnostics,
    rho_override: Option<f64>,
}

impl Accumulator<'_> {
    fn log_cov(&mut self, l: usize, lambda: f64, mu: f64, f_ratio: f64) -> Result<f64> {
        let raw = self.rho_override.unwrap_or_else(|| correlation_with_ratio(l, lambda, mu, f_ratio));
        let (rho, clipped) = clip_rho(raw);
        self.diag.clip_events += clipped as usize;
        let v = log_periodogram_cov(rho * rho, self.ctl)?;
        self.diag.truncated_series += v.truncated as usize;
        self.diag.max_terms = self.diag.max_terms.max(v.terms);
        Ok(v.value)
    }
}

/// Covariances with default series control and no overrides.
pub fn estimator_covariances(model: &ArfimaModel, n: usize, plan: &SubsamplePlan, alpha: f64) -> Result<CovarianceBundle> {
    estimator_covariances_with(model, n, plan, alpha, CovarianceOptions::default())
}

pub fn estimator_covariances_with(
    model: &ArfimaModel,
    n: usize,
    plan: &SubsamplePlan,
    alpha: f64,
    opts: CovarianceOptions,
) -> Result<CovarianceBundle> {
    model.validate()?;
    if plan.n != n {
        return Err(Error::LengthMismatch { expected: n, got: plan.n });
    }
    let l = plan.l;
    let full = SpectralGrid::new(n, alpha)?;
    let sub = SpectralGrid::new(l, alpha)?;
    let rf = LprRegressors::new(&full);
    let rs = LprRegressors::new(&sub);
    let f_full: Vec<f64> = full.lambdas.iter().map(|&x| spectral_density(model, x)).collect::<Result<_>>()?;
    let f_sub: Vec<f64> = sub.lambdas.iter().map(|&x| spectral_density(model, x)).collect::<Result<_>>()?;

    let mut diag = CovarianceDiagnostics::default();
    let mut acc = Accumulator { ctl: opts.series, diag: &mut diag, rho_override: opts.rho_override };

    let mut cs = 0.0;
    for (j, &lam) in full.lambdas.iter().enumerate() {
        let mut row = 0.0;
        for (k, &mu) in sub.lambdas.iter().enumerate() {
            row += rs.a[k] * acc.log_cov(l, lam, mu, f_full[j] / f_sub[k])?;
        }
        cs += rf.a[j] * row;
    }
    cs /= 4.0 * rf.sxx * rs.sxx;

    let mut cd = 0.0;
    for (j, &mj) in sub.lambdas.iter().enumerate() {
        let mut row = 0.0;
        for (k, &mk) in sub.lambdas.iter().enumerate() {
            row += rs.a[k] * acc.log_cov(l, mj, mk, f_sub[j] / f_sub[k])?;
        }
        cd += rs.a[j] * row;
    }
    cd /= 4.0 * rs.sxx * rs.sxx;

    let m = plan.m;
    let c_dagger = (0..m).map(|i| (0..m).map(|j| if i == j { 0.0 } else { cd }).collect()).collect();
    Ok(CovarianceBundle {
        c_star: vec![cs; m],
        c_dagger,
        model_used: model.clone(),
        plan: plan.clone(),
        alpha,
        diagnostics: diag,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct CacheKey {
    model: Vec<u64>,
    n: usize,
    m: usize,
    scheme: Scheme,
    alpha: u64,
}

impl CacheKey {
    fn new(model: &ArfimaModel, plan: &SubsamplePlan, alpha: f64) -> Self {
        let mut bits = vec![model.d.to_bits(), model.sigma2.to_bits(), model.ar.len() as u64];
        bits.extend(model.ar.iter().map(|v| v.to_bits()));
        bits.extend(model.ma.iter().map(|v| v.to_bits()));
        Self { model: bits, n: plan.n, m: plan.m, scheme: plan.scheme, alpha: alpha.to_bits() }
    }
}

/// Read-mostly cache of covariance bundles, safe to share between workers.
#[derive(Debug, Default)]
pub struct CovarianceCache {
    inner: RwLock<HashMap<CacheKey, Arc<CovarianceBundle>>>,
}

impl CovarianceCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_compute(&self, model: &ArfimaModel, plan: &SubsamplePlan, alpha: f64) -> Result<Arc<CovarianceBundle>> {
        let key = CacheKey::new(model, plan, alpha);
        if let Some(hit) = self.inner.read().expect("cache lock poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let bundle = Arc::new(estimator_covariances(model, plan.n, plan, alpha)?);
        let mut w = self.inner.write().expect("cache lock poisoned");
        Ok(Arc::clone(w.entry(key).or_insert(bundle)))
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
