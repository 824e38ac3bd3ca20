//! Pre-whitened estimator: remove the fitted short-memory dynamics, then pick
//! `d` by minimizing the sum of squares of the fractionally differenced series.

use crate::arfima::frac_diff;
use crate::arma::{arma_residuals, fit_arma_css};
use crate::error::{Error, Result};
use crate::optim::brent_multistart;

/// Interval searched for `d`; wider than the stationary range so the estimate
/// is not pinned at a boundary.
pub const PW_D_RANGE: (f64, f64) = (-1.0, 1.5);

/// `argmin_d sum_t [(1 - B)^d e_t]^2` over [`PW_D_RANGE`].
pub fn fractional_css_d(whitened: &[f64]) -> Result<f64> {
    if whitened.len() < 3 {
        return Err(Error::Domain("series too short for the fractional CSS fit".into()));
    }
    let obj = |d: f64| frac_diff(whitened, d).iter().map(|v| v * v).sum::<f64>();
    let r = brent_multistart(obj, PW_D_RANGE.0, PW_D_RANGE.1, 3, 1e-8);
    if !r.fx.is_finite() {
        return Err(Error::Optimizer("non-finite fractional sum of squares".into()));
    }
    Ok(r.x[0])
}

/// Pre-whitened estimate with known ARMA coefficients.
pub fn fit_pw_known(series: &[f64], ar: &[f64], ma: &[f64]) -> Result<f64> {
    fractional_css_d(&arma_residuals(series, ar, ma))
}

/// Fits ARMA(p, q) by CSS, whitens with the fit and estimates `d`.
pub fn fit_pw(series: &[f64], p: usize, q: usize) -> Result<f64> {
    let fit = fit_arma_css(series, p, q)?;
    fit_pw_known(series, &fit.ar, &fit.ma)
}
