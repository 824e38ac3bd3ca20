//! Conditional-sum-of-squares fitting of ARMA(p, q) models, using the same
//! `1 + a_1 B + ...` polynomial convention as [`crate::arfima`].

use crate::arfima::roots_outside_unit_circle;
use crate::error::{Error, Result};
use crate::optim::{brent, nelder_mead};

/// Coefficient box used by the fitter.
pub const COEFF_BOUND: f64 = 0.99;

/// Fitted short-memory coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmaFit {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub sigma2: f64,
    pub converged: bool,
}

/// Residuals `e_t` of `(1 + ar B) x_t = (1 + ma B) e_t` with zero pre-sample
/// values, for `t = 0..n`.
pub fn arma_residuals(series: &[f64], ar: &[f64], ma: &[f64]) -> Vec<f64> {
    let n = series.len();
    let mut e = vec![0.0; n];
    for t in 0..n {
        let mut v = series[t];
        for (i, a) in ar.iter().enumerate() {
            if t > i {
                v += a * series[t - 1 - i];
            }
        }
        for (j, b) in ma.iter().enumerate() {
            if t > j {
                v -= b * e[t - 1 - j];
            }
        }
        e[t] = v;
    }
    e
}

/// Conditional sum of squares, conditioning on the first `p` observations.
pub fn css(series: &[f64], ar: &[f64], ma: &[f64]) -> f64 {
    arma_residuals(series, ar, ma)[ar.len()..].iter().map(|e| e * e).sum()
}

/// CSS fit of an ARMA(p, q) with stationarity and invertibility enforced.
pub fn fit_arma_css(series: &[f64], p: usize, q: usize) -> Result<ArmaFit> {
    let k = p + q;
    let n = series.len();
    if n < k + 3 {
        return Err(Error::ArmaFit(format!("series of length {n} too short for ARMA({p},{q})")));
    }
    let objective = |theta: &[f64]| -> f64 {
        let (ar, ma) = theta.split_at(p);
        if !roots_outside_unit_circle(ar) || !roots_outside_unit_circle(ma) {
            return f64::INFINITY;
        }
        css(series, ar, ma)
    };
    let (theta, converged) = match k {
        0 => (vec![], true),
        1 => {
            let r = brent(|x| objective(&[x]), -COEFF_BOUND, COEFF_BOUND, 1e-10, 200);
            (r.x, r.converged)
        }
        _ => {
            let lo = vec![-COEFF_BOUND; k];
            let hi = vec![COEFF_BOUND; k];
            let mut r = nelder_mead(objective, &vec![0.0; k], 0.1, &lo, &hi, 1e-10, 4000);
            // One restart from the best point refreshes a collapsed simplex.
            let again = nelder_mead(objective, &r.x, 0.05, &lo, &hi, 1e-10, 4000);
            if again.fx <= r.fx {
                r = again;
            }
            (r.x, r.converged)
        }
    };
    let (ar, ma) = theta.split_at(p);
    let s = css(series, ar, ma);
    if !s.is_finite() {
        return Err(Error::ArmaFit("no stationary, invertible point found".into()));
    }
    Ok(ArmaFit { ar: ar.to_vec(), ma: ma.to_vec(), sigma2: s / (n - p) as f64, converged })
}
