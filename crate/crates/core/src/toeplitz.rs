//! Durbin-Levinson recursion for symmetric positive-definite Toeplitz systems.
//!
//! The recursion is streamed: only the current row of prediction coefficients
//! is kept, so memory stays O(n) even when the caller walks all n steps.

use crate::error::{Error, Result};

/// Walks the one-step prediction recursion for the autocovariances `gamma`.
///
/// `visit(t, phi, v)` is called for t = 0..n-1 with the coefficients of the
/// best linear predictor of x_t from x_{t-1}, ..., x_0 (`phi[j]` multiplies
/// x_{t-1-j}) and the prediction error variance `v`.
pub fn durbin_levinson<F>(gamma: &[f64], n: usize, mut visit: F) -> Result<()>
where
    F: FnMut(usize, &[f64], f64),
{
    if gamma.len() < n {
        return Err(Error::LengthMismatch { expected: n, got: gamma.len() });
    }
    if n == 0 {
        return Ok(());
    }
    let mut phi: Vec<f64> = Vec::with_capacity(n);
    let mut prev: Vec<f64> = Vec::with_capacity(n);
    let mut v = gamma[0];
    if !(v > 0.0) {
        return Err(Error::NotPositiveDefinite { lag: 0 });
    }
    visit(0, &phi, v);
    for t in 1..n {
        let mut acc = gamma[t];
        for (j, p) in phi.iter().enumerate() {
            acc -= p * gamma[t - 1 - j];
        }
        let kappa = acc / v;
        prev.clear();
        prev.extend_from_slice(&phi);
        for j in 0..prev.len() {
            phi[j] = prev[j] - kappa * prev[prev.len() - 1 - j];
        }
        phi.push(kappa);
        v *= 1.0 - kappa * kappa;
        if !(v > 0.0) || kappa.abs() >= 1.0 {
            return Err(Error::NotPositiveDefinite { lag: t });
        }
        visit(t, &phi, v);
    }
    Ok(())
}

/// Standardized one-step prediction errors `e_t / sqrt(v_t)` of several series
/// at once, plus `sum_t log v_t` (the log-determinant of the Toeplitz matrix).
pub fn whiten(gamma: &[f64], series: &[&[f64]]) -> Result<(Vec<Vec<f64>>, f64)> {
    let n = series.first().map_or(0, |s| s.len());
    for s in series {
        if s.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: s.len() });
        }
    }
    let mut out = vec![vec![0.0; n]; series.len()];
    let mut logdet = 0.0;
    durbin_levinson(gamma, n, |t, phi, v| {
        logdet += v.ln();
        let sd = v.sqrt();
        for (k, s) in series.iter().enumerate() {
            let mut e = s[t];
            for (j, p) in phi.iter().enumerate() {
                e -= p * s[t - 1 - j];
            }
            out[k][t] = e / sd;
        }
    })?;
    Ok((out, logdet))
}
