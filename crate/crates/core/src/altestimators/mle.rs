//! Exact Gaussian maximum likelihood with the mean and innovation variance
//! concentrated out.

use serde::{Deserialize, Serialize};

use crate::arfima::{autocovariances_exact, frac_diff, roots_outside_unit_circle, ArfimaModel};
use crate::arma::{fit_arma_css, COEFF_BOUND};
use crate::error::{Error, Result};
use crate::optim::{brent_multistart, nelder_mead};
use crate::toeplitz::whiten;

/// Open interval searched for `d`.
pub const D_BOUND: f64 = 0.499;

/// `(d, AR, MA)` parameter vector of the likelihood.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MleParams {
    pub d: f64,
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
}

impl MleParams {
    pub fn is_valid(&self) -> bool {
        self.d > -0.5 && self.d < 0.5 && roots_outside_unit_circle(&self.ar) && roots_outside_unit_circle(&self.ma)
    }

    fn model(&self) -> ArfimaModel {
        ArfimaModel { d: self.d, ar: self.ar.clone(), ma: self.ma.clone(), sigma2: 1.0, mu: 0.0 }
    }
}

/// `-(n/2) log[(y - mu 1)' S^{-1} (y - mu 1)] - (1/2) log|S|` with `S` the
/// unit-variance autocovariance matrix and `mu` its GLS mean.
pub fn mle_profile_loglik(series: &[f64], params: &MleParams) -> Result<f64> {
    if !params.is_valid() {
        return Err(Error::Domain(format!("invalid likelihood parameters {params:?}")));
    }
    let n = series.len();
    if n < params.ar.len() + params.ma.len() + 2 {
        return Err(Error::Domain(format!("series of length {n} too short")));
    }
    let gamma = autocovariances_exact(&params.model(), n - 1)?;
    let ones = vec![1.0; n];
    let (w, logdet) = whiten(&gamma, &[series, &ones])?;
    let (ey, e1) = (&w[0], &w[1]);
    let s11: f64 = e1.iter().map(|v| v * v).sum();
    let s1y: f64 = e1.iter().zip(ey).map(|(a, b)| a * b).sum();
    let mu = s1y / s11;
    let q: f64 = ey.iter().zip(e1).map(|(y, o)| (y - mu * o).powi(2)).sum();
    Ok(-0.5 * n as f64 * q.ln() - 0.5 * logdet)
}

/// Short-memory coefficients held fixed during the fit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FixedShort {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
}

fn neg_loglik(series: &[f64], p: &MleParams) -> f64 {
    if !p.is_valid() {
        return f64::INFINITY;
    }
    match mle_profile_loglik(series, p) {
        Ok(v) if v.is_finite() => -v,
        _ => f64::INFINITY,
    }
}

/// Maximizes the profile likelihood over `d` (and the ARMA coefficients unless
/// `fix_short` is given).
pub fn fit_mle(series: &[f64], p: usize, q: usize, fix_short: Option<&FixedShort>) -> Result<MleParams> {
    let (fixed_ar, fixed_ma) = match fix_short {
        Some(f) => (f.ar.clone(), f.ma.clone()),
        None => (vec![], vec![]),
    };
    if fix_short.is_some() || p + q == 0 {
        let obj = |d: f64| neg_loglik(series, &MleParams { d, ar: fixed_ar.clone(), ma: fixed_ma.clone() });
        let r = brent_multistart(obj, -D_BOUND, D_BOUND, 3, 1e-8);
        if !r.fx.is_finite() {
            return Err(Error::Optimizer("likelihood not finite anywhere on the d interval".into()));
        }
        return Ok(MleParams { d: r.x[0], ar: fixed_ar, ma: fixed_ma });
    }
    let k = 1 + p + q;
    let unpack = |x: &[f64]| MleParams { d: x[0], ar: x[1..=p].to_vec(), ma: x[1 + p..].to_vec() };
    let mut lo = vec![-D_BOUND; k];
    let mut hi = vec![D_BOUND; k];
    for i in 1..k {
        lo[i] = -COEFF_BOUND;
        hi[i] = COEFF_BOUND;
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    for d0 in [-0.3, 0.0, 0.3] {
        let mut x0 = vec![d0];
        match fit_arma_css(&frac_diff(series, d0), p, q) {
            Ok(f) => {
                x0.extend(f.ar);
                x0.extend(f.ma);
            }
            Err(_) => x0.extend(std::iter::repeat_n(0.0, p + q)),
        }
        let r = nelder_mead(|x| neg_loglik(series, &unpack(x)), &x0, 0.1, &lo, &hi, 1e-8, 3000);
        if r.fx.is_finite() && best.as_ref().is_none_or(|b| r.fx < b.1) {
            best = Some((r.x, r.fx));
        }
    }
    let (x, _) = best.ok_or_else(|| Error::Optimizer("no start produced a finite likelihood".into()))?;
    Ok(unpack(&x))
}
