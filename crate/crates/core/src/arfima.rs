//! ARFIMA(p, d, q) models: spectral density, autocovariances and exact
//! Gaussian simulation.
//!
//! Polynomials are stored in the form `1 + a_1 B + ... + a_p B^p`, for both the
//! AR and MA side. A model with `ar = [0.4]` therefore satisfies
//! `(1 + 0.4 B)(1 - B)^d (Y_t - mu) = e_t`, i.e. the conventional AR coefficient
//! is `-0.4`.
//!
//! The short-memory factor is `f*(l) = sigma2 / (2 pi) |Theta|^2 / |Phi|^2` and is
//! not renormalized to integrate log f* to zero. Every quantity downstream
//! depends only on ratios such as `f*''(0) / f*(0)` or `f(l) / f(m)`, which are
//! invariant to that constant.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::ln_gamma;
use crate::toeplitz::durbin_levinson;

/// Parameters of a stationary, invertible ARFIMA process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArfimaModel {
    pub d: f64,
    #[serde(default, alias = "phi", deserialize_with = "one_or_many")]
    pub ar: Vec<f64>,
    #[serde(default, alias = "theta", deserialize_with = "one_or_many")]
    pub ma: Vec<f64>,
    #[serde(default = "one")]
    pub sigma2: f64,
    #[serde(default)]
    pub mu: f64,
}

fn one() -> f64 {
    1.0
}

/// Accepts either a bare number or a list of numbers.
fn one_or_many<'de, D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(match OneOrMany::deserialize(de)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

impl ArfimaModel {
    /// Validated constructor with unit innovation variance and zero mean.
    pub fn new(d: f64, ar: Vec<f64>, ma: Vec<f64>) -> Result<Self> {
        let m = Self { d, ar, ma, sigma2: 1.0, mu: 0.0 };
        m.validate()?;
        Ok(m)
    }

    /// Fractional noise with the given memory parameter.
    pub fn fractional_noise(d: f64) -> Result<Self> {
        Self::new(d, vec![], vec![])
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d > -0.5 && self.d < 0.5) {
            return Err(Error::Domain(format!("d must lie in (-0.5, 0.5), got {}", self.d)));
        }
        if !(self.sigma2 > 0.0) || !self.sigma2.is_finite() {
            return Err(Error::Domain(format!("sigma2 must be positive, got {}", self.sigma2)));
        }
        if !self.mu.is_finite() {
            return Err(Error::Domain("mu must be finite".into()));
        }
        if !roots_outside_unit_circle(&self.ar) {
            return Err(Error::Domain(format!("AR polynomial {:?} is not stationary", self.ar)));
        }
        if !roots_outside_unit_circle(&self.ma) {
            return Err(Error::Domain(format!("MA polynomial {:?} is not invertible", self.ma)));
        }
        Ok(())
    }

    /// Short label such as `ARFIMA(1,d,0)`.
    pub fn label(&self) -> String {
        format!("ARFIMA({},d,{})", self.ar.len(), self.ma.len())
    }

    /// Same model with another memory parameter.
    pub fn with_d(&self, d: f64) -> Self {
        Self { d, ..self.clone() }
    }
}

/// Schur-Cohn step-down test: all roots of `1 + a_1 z + ... + a_p z^p` lie
/// strictly outside the unit circle.
pub fn roots_outside_unit_circle(coeffs: &[f64]) -> bool {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return false;
    }
    let mut a = coeffs.to_vec();
    while let Some(&k) = a.last() {
        if k.abs() >= 1.0 {
            return false;
        }
        let p = a.len();
        let denom = 1.0 - k * k;
        let next: Vec<f64> = (0..p - 1).map(|i| (a[i] - k * a[p - 2 - i]) / denom).collect();
        a = next;
    }
    true
}

fn poly_at(coeffs: &[f64], lambda: f64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (k, c) in coeffs.iter().enumerate() {
        acc += Complex64::from_polar(*c, -((k + 1) as f64) * lambda);
    }
    acc
}

/// `sigma2 / (2 pi) * |Theta(e^{-i l})|^2 / |Phi(e^{-i l})|^2`.
pub fn arma_spectral_factor(model: &ArfimaModel, lambda: f64) -> f64 {
    model.sigma2 / (2.0 * PI) * poly_at(&model.ma, lambda).norm_sqr() / poly_at(&model.ar, lambda).norm_sqr()
}

/// `(2 sin(l/2))^{-2d} f*(l)` for `0 < l <= pi` (and, by symmetry, negative l).
pub fn spectral_density(model: &ArfimaModel, lambda: f64) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(Error::Domain(format!("non-finite frequency {lambda}")));
    }
    let s = 2.0 * (0.5 * lambda).sin().abs();
    if s == 0.0 {
        if model.d > 0.0 {
            return Err(Error::Domain("spectral density has a pole at frequency zero".into()));
        }
        if model.d < 0.0 {
            return Ok(0.0);
        }
    }
    let frac = if model.d == 0.0 { 1.0 } else { s.powf(-2.0 * model.d) };
    Ok(frac * arma_spectral_factor(model, lambda))
}

/// Second derivative at zero of an even function by a fourth-order central
/// difference with step `h`.
pub fn even_second_derivative<F: Fn(f64) -> f64>(f: F, h: f64) -> f64 {
    (-2.0 * f(2.0 * h) + 32.0 * f(h) - 30.0 * f(0.0)) / (12.0 * h * h)
}

/// `f*''(0)` by finite differences with step 1e-3.
pub fn fstar_second_derivative_at_zero(model: &ArfimaModel) -> f64 {
    even_second_derivative(|l| arma_spectral_factor(model, l), 1e-3)
}

/// Autocovariances of unit-variance fractional noise, lags `0..=max_lag`.
pub fn fractional_noise_acvf(d: f64, max_lag: usize) -> Result<Vec<f64>> {
    if !(d > -0.5 && d < 0.5) {
        return Err(Error::Domain(format!("d must lie in (-0.5, 0.5), got {d}")));
    }
    let g0 = (ln_gamma(1.0 - 2.0 * d)? - 2.0 * ln_gamma(1.0 - d)?).exp();
    let mut g = Vec::with_capacity(max_lag + 1);
    g.push(g0);
    for k in 1..=max_lag {
        let kf = k as f64;
        let prev = g[k - 1];
        g.push(prev * (kf - 1.0 + d) / (kf - d));
    }
    Ok(g)
}

/// MA(infinity) weights of `Theta(B) / Phi(B)`, truncated once they are
/// negligible.
fn arma_psi_weights(ar: &[f64], ma: &[f64]) -> Vec<f64> {
    const MAX_TERMS: usize = 200_000;
    let p = ar.len();
    let q = ma.len();
    let mut psi = vec![1.0];
    let mut small_run = 0;
    let mut peak: f64 = 1.0;
    for j in 1..MAX_TERMS {
        let mut v = if j <= q { ma[j - 1] } else { 0.0 };
        for i in 1..=p.min(j) {
            v -= ar[i - 1] * psi[j - i];
        }
        peak = peak.max(v.abs());
        psi.push(v);
        if p == 0 && j >= q {
            break;
        }
        if j > q && v.abs() < 1e-17 * peak {
            small_run += 1;
            if small_run > p {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    psi
}

/// Autocovariances of the short-memory ARMA part (unit innovation variance),
/// lags `0..` until negligible.
pub fn arma_acvf(ar: &[f64], ma: &[f64]) -> Vec<f64> {
    let psi = arma_psi_weights(ar, ma);
    (0..psi.len())
        .map(|h| psi.iter().zip(&psi[h..]).map(|(a, b)| a * b).sum())
        .collect()
}

/// Exact autocovariances `gamma_0..gamma_max_lag` by convolving the
/// fractional-noise autocovariances with those of the ARMA part.
pub fn autocovariances_exact(model: &ArfimaModel, max_lag: usize) -> Result<Vec<f64>> {
    model.validate()?;
    let r = arma_acvf(&model.ar, &model.ma);
    let j = r.len() - 1;
    let fnv = fractional_noise_acvf(model.d, max_lag + j)?;
    let out = (0..=max_lag)
        .map(|k| {
            let mut acc = r[0] * fnv[k];
            for (h, rh) in r.iter().enumerate().skip(1) {
                acc += rh * (fnv[k + h] + fnv[k.abs_diff(h)]);
            }
            model.sigma2 * acc
        })
        .collect();
    Ok(out)
}

/// Autocovariances `gamma_k = 2 int_0^pi cos(k l) f(l) dl` by adaptive
/// quadrature.
///
/// The substitution `l = pi s^{1/(1-2d)}` absorbs the `l^{-2d}` behaviour at
/// the origin so the transformed integrand is smooth for any `d`. Each lag is
/// split into panels proportional to the lag so every panel sees a bounded
/// number of oscillations.
pub fn autocovariances(model: &ArfimaModel, max_lag: usize) -> Result<Vec<f64>> {
    model.validate()?;
    let d = model.d;
    let e = 1.0 - 2.0 * d;
    let scale = 2.0 * PI.powf(e) / e;
    let integrand = |k: usize| {
        let kf = k as f64;
        move |s: f64| {
            let lambda = PI * s.powf(1.0 / e);
            // (2 sin(l/2) / l)^{-2d}, which tends to 1 at the origin.
            let ratio = if lambda < 1e-8 { 1.0 } else { 2.0 * (0.5 * lambda).sin() / lambda };
            scale * (kf * lambda).cos() * ratio.powf(-2.0 * d) * arma_spectral_factor(model, lambda)
        }
    };
    let integrate_lag = |k: usize, abs_tol: f64| -> Result<f64> {
        let panels = (k + 4).max(8);
        let f = integrand(k);
        let mut total = 0.0;
        let mut err = 0.0;
        let mut converged = true;
        for p in 0..panels {
            let a = (p as f64 / panels as f64).powf(e);
            let b = ((p + 1) as f64 / panels as f64).powf(e);
            let r = quad::integrate(&f, a, b, abs_tol / panels as f64, 400);
            total += r.value;
            err += r.error;
            converged &= r.converged;
        }
        if !converged {
            return Err(Error::Quadrature { lag: k, error_estimate: err });
        }
        Ok(total)
    };
    let g0 = integrate_lag(0, 1e-13 * model.sigma2)?;
    let tol = 1e-10 * g0;
    let mut out = Vec::with_capacity(max_lag + 1);
    out.push(g0);
    for k in 1..=max_lag {
        out.push(integrate_lag(k, tol)?);
    }
    Ok(out)
}

/// Exact Gaussian draw of length `gamma.len()` with the given autocovariances
/// and mean, by sequential conditional sampling.
pub fn simulate_from_acvf<R: Rng + ?Sized>(gamma: &[f64], mu: f64, rng: &mut R) -> Result<Vec<f64>> {
    let n = gamma.len();
    let mut x = vec![0.0; n];
    durbin_levinson(gamma, n, |t, phi, v| {
        let mut mean = 0.0;
        for (j, p) in phi.iter().enumerate() {
            mean += p * x[t - 1 - j];
        }
        let z: f64 = rng.sample(StandardNormal);
        x[t] = mean + v.sqrt() * z;
    })?;
    for v in &mut x {
        *v += mu;
    }
    Ok(x)
}

/// One exact Gaussian sample path of length `n`.
pub fn simulate<R: Rng + ?Sized>(model: &ArfimaModel, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Domain(format!("simulation needs n >= 2, got {n}")));
    }
    let gamma = autocovariances_exact(model, n - 1)?;
    simulate_from_acvf(&gamma, model.mu, rng)
}

/// Applies the truncated binomial expansion of `(1 - B)^d`.
pub fn frac_diff(series: &[f64], d: f64) -> Vec<f64> {
    let n = series.len();
    let mut pi = Vec::with_capacity(n);
    pi.push(1.0);
    for j in 1..n {
        let prev = pi[j - 1];
        pi.push(prev * (j as f64 - 1.0 - d) / j as f64);
    }
    (0..n)
        .map(|t| (0..=t).map(|j| pi[j] * series[t - j]).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn spectral_factor_examples() {
        let wn = ArfimaModel::fractional_noise(0.3).unwrap();
        assert_relative_eq!(arma_spectral_factor(&wn, 1.0), 1.0 / (2.0 * PI), max_relative = 1e-15);
        let ar = ArfimaModel::new(0.0, vec![0.4], vec![]).unwrap();
        assert_relative_eq!(arma_spectral_factor(&ar, 0.0), 1.0 / (2.0 * PI) / 1.96, max_relative = 1e-15);
        let ma = ArfimaModel::new(0.0, vec![], vec![0.9]).unwrap();
        assert_relative_eq!(arma_spectral_factor(&ma, PI), 0.01 / (2.0 * PI), max_relative = 1e-12);
    }

    #[test]
    fn spectral_density_examples() {
        let wn = ArfimaModel::fractional_noise(0.0).unwrap();
        assert_relative_eq!(spectral_density(&wn, 0.3).unwrap(), 1.0 / (2.0 * PI));
        let fnz = ArfimaModel::fractional_noise(0.25).unwrap();
        assert_relative_eq!(spectral_density(&fnz, PI).unwrap(), 0.5f64.sqrt() / (2.0 * PI), max_relative = 1e-14);
        assert!(spectral_density(&fnz, 0.0).is_err());
        let m = ArfimaModel::new(0.25, vec![-0.4], vec![]).unwrap();
        let direct = (2.0 * 0.05f64.sin()).powf(-0.5) * arma_spectral_factor(&m, 0.1);
        assert_relative_eq!(spectral_density(&m, 0.1).unwrap(), direct);
    }

    #[test]
    fn stationarity_test() {
        assert!(roots_outside_unit_circle(&[0.9]));
        assert!(!roots_outside_unit_circle(&[1.0]));
        // (1 - 0.5 z)(1 - 0.8 z) = 1 - 1.3 z + 0.4 z^2
        assert!(roots_outside_unit_circle(&[-1.3, 0.4]));
        // (1 - 1.25 z)(1 - 0.5 z) has a root inside
        assert!(!roots_outside_unit_circle(&[-1.75, 0.625]));
        assert!(ArfimaModel::new(0.5, vec![], vec![]).is_err());
    }

    #[test]
    fn second_derivative_matches_analytic_ar1() {
        // f*(l) = 1/(2pi) / (1 + a^2 + 2a cos l); f*''(0) = 2a / (2pi (1+a)^4)
        let a = 0.4;
        let m = ArfimaModel::new(0.0, vec![a], vec![]).unwrap();
        let analytic = 2.0 * a / (2.0 * PI * (1.0 + a).powi(4));
        assert_relative_eq!(fstar_second_derivative_at_zero(&m), analytic, max_relative = 1e-6);
        let wn = ArfimaModel::fractional_noise(0.2).unwrap();
        assert!(fstar_second_derivative_at_zero(&wn).abs() < 1e-9);
        let scaled = even_second_derivative(|l| arma_spectral_factor(&m, 3.0 * l), 1e-3);
        assert_relative_eq!(scaled, 9.0 * analytic, max_relative = 1e-5);
    }

    #[test]
    fn quadrature_matches_closed_forms() {
        let fnz = ArfimaModel::fractional_noise(0.25).unwrap();
        let q = autocovariances(&fnz, 20).unwrap();
        let exact = fractional_noise_acvf(0.25, 20).unwrap();
        assert_relative_eq!(exact[0], 1.180_340_599_016_096_2, max_relative = 1e-14);
        for k in 0..=20 {
            assert!((q[k] - exact[k]).abs() < 1e-8, "lag {k}: {} vs {}", q[k], exact[k]);
        }
        let ar = ArfimaModel::new(0.0, vec![-0.4], vec![]).unwrap();
        let q = autocovariances(&ar, 10).unwrap();
        for (k, v) in q.iter().enumerate() {
            let target = 0.4f64.powi(k as i32) / (1.0 - 0.16);
            assert!((v - target).abs() < 1e-8);
        }
    }

    #[test]
    fn exact_route_agrees_with_quadrature_for_arfima() {
        for m in [
            ArfimaModel::new(0.3, vec![-0.7], vec![0.2]).unwrap(),
            ArfimaModel::new(-0.3, vec![0.4], vec![]).unwrap(),
            ArfimaModel::new(0.1, vec![], vec![-0.5]).unwrap(),
        ] {
            let a = autocovariances(&m, 40).unwrap();
            let b = autocovariances_exact(&m, 40).unwrap();
            for k in 0..=40 {
                assert!((a[k] - b[k]).abs() < 1e-8 * b[0], "{m:?} lag {k}");
            }
        }
    }

    #[test]
    fn white_noise_acvf() {
        let g = autocovariances(&ArfimaModel::fractional_noise(0.0).unwrap(), 3).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-12 && g[1].abs() < 1e-12);
    }

    #[test]
    fn simulation_is_deterministic() {
        let m = ArfimaModel::new(0.2, vec![0.4], vec![]).unwrap();
        let a = simulate(&m, 64, &mut ChaCha20Rng::seed_from_u64(7)).unwrap();
        let b = simulate(&m, 64, &mut ChaCha20Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a, b);
        assert!(simulate(&m, 1, &mut ChaCha20Rng::seed_from_u64(7)).is_err());
    }

    #[test]
    fn frac_diff_inverts_integration() {
        let y = [1.0, 0.5, -0.3, 2.0, 0.7];
        let back = frac_diff(&frac_diff(&y, 0.3), -0.3);
        for (a, b) in y.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
        let diff1 = frac_diff(&y, 1.0);
        assert_eq!(diff1[0], 1.0);
        assert!((diff1[3] - 2.3).abs() < 1e-15);
    }
}
