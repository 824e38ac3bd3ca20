//! Weighted average of LPR estimates over a ladder of bandwidths, combined by
//! GLS so that the intercept removes the leading bias terms.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lpr::{log_ordinates, lpr_slope};
use crate::spectral::{bandwidth, floor_snapped, periodogram, LprRegressors, SpectralGrid};

/// Shape of the GLS design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GsDesign {
    /// Columns `1, q^2, ..., q^{2r}, q^{2+2r} - delta sum_p q_p^{2+2r}`.
    #[default]
    BiasReduced,
    /// Intercept only: the GLS mean of the constituent estimates.
    InterceptOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GsConfig {
    pub r: usize,
    pub q_grid: Vec<f64>,
    /// Overrides [`gs_delta`] when set.
    pub delta: Option<f64>,
    pub alpha: f64,
    /// Externally supplied base bandwidth, replacing `floor(n^alpha)`.
    pub base_bandwidth: Option<usize>,
    pub design: GsDesign,
}

impl Default for GsConfig {
    fn default() -> Self {
        Self {
            r: 1,
            q_grid: (0..=20).map(|i| 1.0 + 0.05 * i as f64).collect(),
            delta: None,
            alpha: 0.65,
            base_bandwidth: None,
            design: GsDesign::BiasReduced,
        }
    }
}

impl GsConfig {
    pub fn validate(&self) -> Result<()> {
        let q = &self.q_grid;
        if q.first() != Some(&1.0) || q.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("q grid must start at 1 and be strictly increasing".into()));
        }
        let cols = match self.design {
            GsDesign::BiasReduced => self.r + 2,
            GsDesign::InterceptOnly => 1,
        };
        if q.len() <= cols {
            return Err(Error::Config(format!("q grid needs more than {cols} points, got {}", q.len())));
        }
        if self.delta == Some(0.0) {
            return Err(Error::Config("delta must be non-zero".into()));
        }
        Ok(())
    }

    pub fn delta(&self) -> Result<f64> {
        match self.delta {
            Some(d) => Ok(d),
            None => gs_delta(self.r, &self.q_grid),
        }
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Coefficient `tau*_k` of the `lambda^{2k+2}` bias term of the plain LPR
/// estimate: `-(2 pi)^{2k+2} (k+1) / ((2k+2)! (2k+3)^2)`. `k = 0` gives `-2 pi^2 / 9`.
pub fn lpr_bias_coefficient(k: usize) -> f64 {
    let e = 2 * k + 2;
    -(2.0 * PI).powi(e as i32) * (k + 1) as f64 / (factorial(e) * ((2 * k + 3) as f64).powi(2))
}

/// Bias coefficient `tau_r` of the order-`r` bias-reduced LPR estimate, on the
/// same scale as [`lpr_bias_coefficient`]: `-(1/2) beta (2 pi)^{2r+2} / (2r+2)!`,
/// with `beta` the population coefficient on `log u` when `u^{2r+2}` is
/// regressed on `(1, log u, u^2, ..., u^{2r})` for `u ~ U(0, 1)`.
pub fn ag_bias_coefficient(r: usize) -> f64 {
    // Regressor exponents: None marks log u.
    let cols: Vec<Option<usize>> = [Some(0), None].into_iter().chain((1..=r).map(|k| Some(2 * k))).collect();
    let target = 2 * r + 2;
    // E[u^a] = 1/(a+1), E[u^a log u] = -1/(a+1)^2, E[(log u)^2] = 2.
    let moment = |x: Option<usize>, y: Option<usize>| match (x, y) {
        (Some(a), Some(b)) => 1.0 / (a + b + 1) as f64,
        (Some(a), None) | (None, Some(a)) => -1.0 / ((a + 1) as f64).powi(2),
        (None, None) => 2.0,
    };
    let k = cols.len();
    let g = DMatrix::from_fn(k, k, |i, j| moment(cols[i], cols[j]));
    let b = DVector::from_fn(k, |i, _| moment(cols[i], Some(target)));
    let beta = g.lu().solve(&b).expect("moment matrix is non-singular")[1];
    -0.5 * beta * (2.0 * PI).powi(target as i32) / factorial(target)
}

/// Default tuning constant `delta = tau_r / (tau*_r sum_k q_k^{2+2r})`.
pub fn gs_delta(r: usize, q_grid: &[f64]) -> Result<f64> {
    if r == 0 {
        return Err(Error::Config("GS order r must be at least 1".into()));
    }
    let s: f64 = q_grid.iter().map(|q| q.powi((2 + 2 * r) as i32)).sum();
    let denom = lpr_bias_coefficient(r) * s;
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::Config("zero denominator in delta".into()));
    }
    Ok(ag_bias_coefficient(r) / denom)
}

/// Design matrix `Z` (one row per `q`).
pub fn gs_design(cfg: &GsConfig) -> Result<DMatrix<f64>> {
    let q = &cfg.q_grid;
    Ok(match cfg.design {
        GsDesign::InterceptOnly => DMatrix::from_element(q.len(), 1, 1.0),
        GsDesign::BiasReduced => {
            let delta = cfg.delta()?;
            let top = (2 + 2 * cfg.r) as i32;
            let s: f64 = q.iter().map(|v| v.powi(top)).sum();
            DMatrix::from_fn(q.len(), cfg.r + 2, |i, j| match j {
                j if j <= cfg.r => q[i].powi(2 * j as i32),
                _ => q[i].powi(top) - delta * s,
            })
        }
    })
}

/// `Omega_ij = 1 / max(q_i, q_j)`.
pub fn gs_omega(q: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(q.len(), q.len(), |i, j| 1.0 / q[i].max(q[j]))
}

/// GLS coefficients `(Z' W Z)^{-1} Z' W y` with `W = Omega^{-1}`.
pub fn gls(z: &DMatrix<f64>, omega: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let chol = omega.clone().cholesky().ok_or_else(|| Error::Domain("Omega is not positive definite".into()))?;
    let wz = chol.solve(z);
    let wy = chol.solve(y);
    let lhs = z.transpose() * &wz;
    let rhs = z.transpose() * wy;
    let cond = {
        let sv = lhs.singular_values();
        sv.max() / sv.min()
    };
    if !(cond < 1e14) {
        return Err(Error::Singular { condition: cond });
    }
    lhs.lu().solve(&rhs).ok_or(Error::Singular { condition: cond })
}

/// Result of a GS fit.
#[derive(Debug, Clone, PartialEq)]
pub struct GsFit {
    pub d: f64,
    pub beta: Vec<f64>,
    pub bandwidths: Vec<usize>,
    pub constituents: Vec<f64>,
}

/// GLS combination of given constituent estimates.
pub fn gs_combine(constituents: &[f64], cfg: &GsConfig) -> Result<Vec<f64>> {
    if constituents.len() != cfg.q_grid.len() {
        return Err(Error::LengthMismatch { expected: cfg.q_grid.len(), got: constituents.len() });
    }
    let z = gs_design(cfg)?;
    let beta = gls(&z, &gs_omega(&cfg.q_grid), &DVector::from_column_slice(constituents))?;
    Ok(beta.iter().copied().collect())
}

pub fn gs_fit(series: &[f64], cfg: &GsConfig) -> Result<GsFit> {
    cfg.validate()?;
    let n = series.len();
    let base = match cfg.base_bandwidth {
        Some(b) => b,
        None => bandwidth(n, cfg.alpha)?,
    };
    let bandwidths: Vec<usize> = cfg.q_grid.iter().map(|q| floor_snapped(q * base as f64)).collect();
    let top = *bandwidths.last().expect("validated non-empty grid");
    let grid = SpectralGrid::with_bandwidth(n, cfg.alpha, top)?;
    let pg = periodogram(series, &grid)?;
    let z = log_ordinates(series, &pg.values)?;
    let constituents = bandwidths
        .iter()
        .map(|&b| {
            let g = SpectralGrid::with_bandwidth(n, cfg.alpha, b)?;
            Ok(lpr_slope(&z[..b], &LprRegressors::new(&g)))
        })
        .collect::<Result<Vec<_>>>()?;
    let beta = gs_combine(&constituents, cfg)?;
    Ok(GsFit { d: beta[0], beta, bandwidths, constituents })
}

/// First GLS coefficient, the bias-reduced estimate of `d`.
pub fn gs_estimate(series: &[f64], cfg: &GsConfig) -> Result<f64> {
    Ok(gs_fit(series, cfg)?.d)
}
