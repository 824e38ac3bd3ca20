//! Log-periodogram regression estimate of the memory parameter.

use std::f64::consts::PI;

use crate::arfima::{arma_spectral_factor, fstar_second_derivative_at_zero, ArfimaModel};
use crate::error::{Error, Result};
use crate::spectral::{periodogram, LprRegressors, SpectralGrid};
use crate::specfun::EULER_GAMMA;

/// Mean of `log(I_j / f_j)` for a Gaussian series is `-EULER_GAMMA`; the OLS
/// intercept absorbs it, so it never enters the slope.
pub const LOG_PERIODOGRAM_INTERCEPT_SHIFT: f64 = -EULER_GAMMA;

/// Ordinates at or below this fraction of `sum y^2 / (2 pi)` (an upper bound on
/// any ordinate) are treated as exact zeros.
const ZERO_ORDINATE_REL: f64 = 1e-20;

/// A point estimate together with the number of frequencies used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LprEstimate {
    pub d: f64,
    pub big_n: usize,
}

/// Regression core: `-0.5 * sum a_j z_j / S_xx` for log-ordinates `z`.
pub fn lpr_slope(log_periodogram: &[f64], regs: &LprRegressors) -> f64 {
    let num: f64 = regs.a.iter().zip(log_periodogram).map(|(a, z)| a * z).sum();
    -0.5 * num / regs.sxx
}

/// Grid and regressors for one sample length, reusable across series.
#[derive(Debug, Clone)]
pub struct LprPlan {
    pub grid: SpectralGrid,
    pub regs: LprRegressors,
}

impl LprPlan {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        Self::from_grid(SpectralGrid::new(n, alpha)?)
    }

    pub fn with_bandwidth(n: usize, alpha: f64, big_n: usize) -> Result<Self> {
        Self::from_grid(SpectralGrid::with_bandwidth(n, alpha, big_n)?)
    }

    fn from_grid(grid: SpectralGrid) -> Result<Self> {
        let regs = LprRegressors::new(&grid);
        Ok(Self { grid, regs })
    }

    pub fn estimate(&self, series: &[f64]) -> Result<LprEstimate> {
        let p = periodogram(series, &self.grid)?;
        let z = log_ordinates(series, &p.values)?;
        Ok(LprEstimate { d: lpr_slope(&z, &self.regs), big_n: self.grid.big_n })
    }
}

/// Logs of periodogram ordinates, failing on (numerically) zero ordinates.
pub fn log_ordinates(series: &[f64], values: &[f64]) -> Result<Vec<f64>> {
    let scale: f64 = series.iter().map(|y| y * y).sum::<f64>() / (2.0 * PI);
    values
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            if v <= ZERO_ORDINATE_REL * scale || v <= 0.0 {
                Err(Error::ZeroPeriodogram { index: j + 1 })
            } else {
                Ok(v.ln())
            }
        })
        .collect()
}

/// LPR estimate with `N = floor(n^alpha)`.
pub fn lpr_estimate(series: &[f64], alpha: f64) -> Result<LprEstimate> {
    LprPlan::new(series.len(), alpha)?.estimate(series)
}

/// Leading-order variance `pi^2 / (24 N)`.
pub fn lpr_theoretical_variance(big_n: usize) -> f64 {
    PI * PI / (24.0 * big_n as f64)
}

/// Leading bias term `-(2 pi^2 / 9) (f*''(0) / f*(0)) N^2 / n^2`.
pub fn lpr_theoretical_bias(model: &ArfimaModel, n: usize, big_n: usize) -> f64 {
    let ratio = fstar_second_derivative_at_zero(model) / arma_spectral_factor(model, 0.0);
    let r = big_n as f64 / n as f64;
    -(2.0 * PI * PI / 9.0) * ratio * r * r
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_log_linear_fit() {
        let plan = LprPlan::new(576, 0.65).unwrap();
        let z: Vec<f64> = plan.regs.x.iter().map(|x| 0.3 - 2.0 * 0.2 * x).collect();
        assert!((lpr_slope(&z, &plan.regs) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn constant_series_errors() {
        let e = lpr_estimate(&[2.0; 96], 0.65).unwrap_err();
        assert!(matches!(e, Error::ZeroPeriodogram { .. }));
    }

    #[test]
    fn variance_reference() {
        assert_relative_eq!(lpr_theoretical_variance(62), 0.006_632_2, max_relative = 1e-4);
        assert_relative_eq!(lpr_theoretical_variance(24), PI * PI / 576.0);
        assert_relative_eq!(lpr_theoretical_variance(1), PI * PI / 24.0);
    }

    #[test]
    fn bias_reference() {
        let wn = ArfimaModel::fractional_noise(0.0).unwrap();
        assert!(lpr_theoretical_bias(&wn, 576, 62).abs() < 1e-9);
        let ar = ArfimaModel::new(0.0, vec![0.4], vec![]).unwrap();
        let b = lpr_theoretical_bias(&ar, 576, 62);
        assert!(b < 0.0);
        assert_relative_eq!(lpr_theoretical_bias(&ar, 4 * 576, 62) * 16.0, b, max_relative = 1e-12);
    }
}
