//! Special functions: Dirichlet kernel, digamma, log-gamma ratios and the
//! covariance series of two correlated log-periodogram ordinates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this, `sin(lambda / 2)` is treated as an exact zero.
const KERNEL_SINGULARITY_TOL: f64 = 1e-12;

/// Truncation control for infinite series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self { rel_tol: 1e-12, max_terms: 500 }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || self.max_terms == 0 {
            return Err(Error::Domain(format!(
                "series control needs rel_tol > 0 and max_terms >= 1, got {:?}",
                self
            )));
        }
        Ok(())
    }
}

/// A truncated series value together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub terms: usize,
    /// `true` when `max_terms` was hit before the tolerance was met.
    pub truncated: bool,
}

fn check_finite(lambda: f64) -> Result<()> {
    if lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("non-finite frequency {lambda}")))
    }
}

/// Dirichlet kernel `sum_{t=1}^T exp(-i lambda t)`.
///
/// Evaluated in closed form; at `lambda = 0 (mod 2 pi)` returns `T` exactly.
pub fn dirichlet_kernel(t: usize, lambda: f64) -> Result<Complex64> {
    check_finite(lambda)?;
    let tf = t as f64;
    let half = (0.5 * lambda).sin();
    if half.abs() < KERNEL_SINGULARITY_TOL {
        // exp(-i 2 pi k t) = 1 for every t, so the sum is T. The sign of
        // sin(lambda/2) alternates with k but the ratio limit is still T
        // after the phase factor is applied.
        return Ok(Complex64::new(tf, 0.0));
    }
    let amp = (0.5 * lambda * tf).sin() / half;
    Ok(Complex64::from_polar(1.0, -0.5 * lambda * (tf + 1.0)) * amp)
}

/// `|Delta_T(lambda)|^2 = sin^2(T lambda / 2) / sin^2(lambda / 2)`, equal to `T^2`
/// at multiples of `2 pi`.
pub fn dirichlet_kernel_abs2(t: usize, lambda: f64) -> Result<f64> {
    check_finite(lambda)?;
    Ok(dirichlet_abs2_unchecked(t, lambda))
}

#[inline]
pub(crate) fn dirichlet_abs2_unchecked(t: usize, lambda: f64) -> f64 {
    let tf = t as f64;
    let half = (0.5 * lambda).sin();
    if half.abs() < KERNEL_SINGULARITY_TOL {
        return tf * tf;
    }
    let num = (0.5 * lambda * tf).sin();
    (num * num) / (half * half)
}

/// Digamma function for positive arguments.
///
/// Shifts the argument above 10 with `psi(x) = psi(x + 1) - 1/x` and then uses
/// the asymptotic expansion.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("digamma needs x > 0, got {x}")));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Bernoulli terms B_{2k} / (2k): 1/12, 1/120, 1/252, 1/240, 1/132, 691/32760, 1/12
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    Ok(acc + x.ln() - 0.5 * inv - tail)
}

/// Natural log of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    Ok(libm::lgamma(x))
}

/// `log(Gamma(a + k) / Gamma(a))` as a sum of logs, so large `k` never overflows.
pub fn gamma_ratio_log(a: f64, k: usize) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("gamma_ratio_log needs a > 0, got {a}")));
    }
    Ok((0..k).map(|j| (a + j as f64).ln()).sum())
}

/// Covariance of two log-periodogram ordinates whose underlying periodograms
/// have squared correlation `rho2`:
///
/// `sqrt(1 - rho2) * S2 - (1 - rho2) * S1^2`, with
/// `S1 = sum_k g_k c_k rho2^k`, `S2 = sum_k g_k^2 c_k rho2^k`,
/// `g_k = psi(1/2 + k) + psi(1/2)` and `c_k = Gamma(1/2 + k) / (Gamma(1/2) k!)`.
///
/// Summation stops once the newest term is below `rel_tol` relative to both
/// partial sums, or after `max_terms` terms (reported as truncated).
pub fn log_periodogram_cov(rho2: f64, ctl: SeriesControl) -> Result<SeriesValue> {
    ctl.validate()?;
    if !(0.0..1.0).contains(&rho2) {
        return Err(Error::Domain(format!("log_periodogram_cov needs 0 <= rho2 < 1, got {rho2}")));
    }
    if rho2 == 0.0 {
        return Ok(SeriesValue { value: 0.0, terms: 0, truncated: false });
    }
    let psi_half = -EULER_GAMMA - 2.0 * std::f64::consts::LN_2;
    // c_k rho2^k is carried as a single product; for k <= max_terms it stays
    // well inside the f64 range because c_k <= 1 and rho2 < 1.
    let mut weight = 1.0;
    let mut psi_k = psi_half; // psi(1/2 + k) for the current k
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    let mut terms = 0;
    let mut converged = false;
    for k in 1..=ctl.max_terms {
        let kf = k as f64;
        psi_k += 1.0 / (kf - 0.5);
        weight *= rho2 * (kf - 0.5) / kf;
        let g = psi_k + psi_half;
        let t1 = g * weight;
        let t2 = g * t1;
        s1 += t1;
        s2 += t2;
        terms = k;
        if t1.abs() <= ctl.rel_tol * s1.abs() && t2.abs() <= ctl.rel_tol * s2.abs() {
            converged = true;
            break;
        }
    }
    let one_minus = 1.0 - rho2;
    Ok(SeriesValue {
        value: one_minus.sqrt() * s2 - one_minus * s1 * s1,
        terms,
        truncated: !converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn brute(t: usize, lambda: f64) -> Complex64 {
        (1..=t).map(|s| Complex64::from_polar(1.0, -lambda * s as f64)).sum()
    }

    #[test]
    fn kernel_special_values() {
        assert_eq!(dirichlet_kernel(8, 0.0).unwrap(), Complex64::new(8.0, 0.0));
        let z = dirichlet_kernel(8, 2.0 * PI / 8.0).unwrap();
        assert!(z.norm() < 1e-14);
        let d = dirichlet_kernel(4, PI / 3.0).unwrap() - brute(4, PI / 3.0);
        assert!(d.norm() < 1e-13);
        assert_eq!(dirichlet_kernel(5, 2.0 * PI).unwrap(), Complex64::new(5.0, 0.0));
    }

    #[test]
    fn kernel_abs2_values() {
        assert_eq!(dirichlet_kernel_abs2(12, 0.0).unwrap(), 144.0);
        assert!(dirichlet_kernel_abs2(6, 2.0 * PI * 2.0 / 6.0).unwrap() < 1e-25);
        assert_relative_eq!(dirichlet_kernel_abs2(5, 0.7).unwrap(), brute(5, 0.7).norm_sqr(), max_relative = 1e-13);
        assert!(dirichlet_kernel_abs2(3, f64::NAN).is_err());
    }

    #[test]
    fn digamma_known_values() {
        assert_relative_eq!(digamma(1.0).unwrap(), -0.577_215_664_901_532_9, max_relative = 1e-14);
        assert_relative_eq!(digamma(0.5).unwrap(), -1.963_510_026_021_423_5, max_relative = 1e-14);
        assert_relative_eq!(digamma(2.5).unwrap(), 0.703_156_640_645_243_2, max_relative = 1e-14);
        assert!(digamma(0.0).is_err());
        assert!(digamma(-1.5).is_err());
    }

    #[test]
    fn gamma_ratio_small_cases() {
        assert_eq!(gamma_ratio_log(0.5, 0).unwrap(), 0.0);
        assert_relative_eq!(gamma_ratio_log(0.5, 1).unwrap(), 0.5f64.ln());
        assert_relative_eq!(gamma_ratio_log(0.5, 4).unwrap(), (0.5f64 * 1.5 * 2.5 * 3.5).ln(), max_relative = 1e-15);
        let via_lgamma = ln_gamma(0.5 + 30.0).unwrap() - ln_gamma(0.5).unwrap();
        assert_relative_eq!(gamma_ratio_log(0.5, 30).unwrap(), via_lgamma, max_relative = 1e-13);
    }

    #[test]
    fn series_at_zero_and_leading_order() {
        let ctl = SeriesControl::default();
        assert_eq!(log_periodogram_cov(0.0, ctl).unwrap().value, 0.0);
        let g1 = digamma(1.5).unwrap() + digamma(0.5).unwrap();
        let lead = 0.5 * g1 * g1 * 0.01;
        let v = log_periodogram_cov(0.01, ctl).unwrap().value;
        assert!((v - lead).abs() / lead < 0.05, "{v} vs {lead}");
    }

    #[test]
    fn series_domain_and_truncation_flag() {
        assert!(log_periodogram_cov(1.0, SeriesControl::default()).is_err());
        assert!(log_periodogram_cov(-0.1, SeriesControl::default()).is_err());
        let short = SeriesControl { rel_tol: 1e-12, max_terms: 3 };
        let v = log_periodogram_cov(0.5, short).unwrap();
        assert!(v.truncated);
        assert_eq!(v.terms, 3);
        assert!(SeriesControl { rel_tol: 0.0, max_terms: 1 }.validate().is_err());
    }
}
