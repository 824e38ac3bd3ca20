//! Jackknife weights: the closed-form (Chambers-type) weights and the
//! variance-minimizing weights from the KKT system.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::covariance::CovarianceBundle;
use super::plan::SubsamplePlan;
use crate::error::{Error, Result};
use crate::spectral::bandwidth;

const CONSTRAINT_TOL: f64 = 1e-10;
const CLOSED_FORM_TOL: f64 = 1e-8;

/// Where a set of weights came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Chambers,
    Optimal,
    FeasibleIteration(usize),
    /// Built directly from numbers, constraints unchecked.
    Raw,
}

/// Full-sample weight `w_n`, sub-sample weights `w_1..w_m` and, for solved
/// weights, the two Lagrange multipliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JackknifeWeights {
    pub w_n: f64,
    pub w_sub: Vec<f64>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub provenance: Provenance,
}

impl JackknifeWeights {
    /// Unchecked weights; mainly for experiments with degenerate combinations.
    pub fn from_raw(w_n: f64, w_sub: Vec<f64>) -> Self {
        Self { w_n, w_sub, delta1: None, delta2: None, provenance: Provenance::Raw }
    }

    /// `w_n - sum w_i - 1`.
    pub fn g1_residual(&self) -> f64 {
        self.w_n - self.w_sub.iter().sum::<f64>() - 1.0
    }

    /// `(N_n^2 / n^2) w_n - m^2 (N_l^2 / l^2) sum w_i`.
    pub fn g2_residual(&self, ratios: &BandwidthRatios) -> f64 {
        ratios.full * self.w_n - ratios.sub_scaled * self.w_sub.iter().sum::<f64>()
    }
}

/// Bandwidth quantities shared by every weight formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthRatios {
    pub n_full: usize,
    pub n_sub: usize,
    /// `N_n^2 / n^2`
    pub full: f64,
    /// `m^2 N_l^2 / l^2`
    pub sub_scaled: f64,
}

impl BandwidthRatios {
    pub fn new(plan: &SubsamplePlan, alpha: f64) -> Result<Self> {
        let n_full = bandwidth(plan.n, alpha)?;
        let n_sub = bandwidth(plan.l, alpha)?;
        let rf = n_full as f64 / plan.n as f64;
        let rs = plan.m as f64 * n_sub as f64 / plan.l as f64;
        Ok(Self { n_full, n_sub, full: rf * rf, sub_scaled: rs * rs })
    }

    /// `[1 - (N_n l / (N_l m n))^2]^{-1}`.
    pub fn closed_form_wn(&self) -> Result<f64> {
        let denom = 1.0 - self.full / self.sub_scaled;
        if denom.abs() < 1e-12 {
            return Err(Error::Singular { condition: f64::INFINITY });
        }
        Ok(1.0 / denom)
    }
}

/// Closed-form weights `w_n = [1 - (N_n l / (N_l m n))^2]^{-1}`, `w_i = (w_n - 1) / m`.
pub fn chambers_weights(plan: &SubsamplePlan, alpha: f64) -> Result<JackknifeWeights> {
    let r = BandwidthRatios::new(plan, alpha)?;
    let w_n = r.closed_form_wn()?;
    Ok(JackknifeWeights {
        w_n,
        w_sub: vec![(w_n - 1.0) / plan.m as f64; plan.m],
        delta1: None,
        delta2: None,
        provenance: Provenance::Chambers,
    })
}

fn check_dims(plan: &SubsamplePlan, cov: &CovarianceBundle) -> Result<()> {
    if cov.c_star.len() != plan.m || cov.c_dagger.len() != plan.m || cov.c_dagger.iter().any(|r| r.len() != plan.m) {
        return Err(Error::LengthMismatch { expected: plan.m, got: cov.c_star.len() });
    }
    Ok(())
}

/// The `(m+3) x (m+3)` KKT matrix in unknown order `(w_n, w_1..w_m, delta1, delta2)`.
pub fn kkt_matrix(plan: &SubsamplePlan, alpha: f64, cov: &CovarianceBundle) -> Result<DMatrix<f64>> {
    check_dims(plan, cov)?;
    let r = BandwidthRatios::new(plan, alpha)?;
    let m = plan.m;
    let dim = m + 3;
    let (d1, d2) = (m + 1, m + 2);
    let mut a = DMatrix::zeros(dim, dim);
    // g1 and g2
    a[(0, 0)] = 1.0;
    a[(1, 0)] = r.full;
    for i in 1..=m {
        a[(0, i)] = -1.0;
        a[(1, i)] = -r.sub_scaled;
    }
    // stationarity in w_n
    a[(2, 0)] = PI * PI / (12.0 * r.n_full as f64);
    for i in 1..=m {
        a[(2, i)] = -2.0 * cov.c_star[i - 1];
    }
    a[(2, d1)] = 1.0;
    a[(2, d2)] = r.full;
    // stationarity in each w_i
    for i in 1..=m {
        let row = 2 + i;
        a[(row, 0)] = -2.0 * cov.c_star[i - 1];
        for j in 1..=m {
            a[(row, j)] = if i == j { PI * PI / (12.0 * r.n_sub as f64) } else { 2.0 * cov.c_dagger[i - 1][j - 1] };
        }
        a[(row, d1)] = -1.0;
        a[(row, d2)] = -r.sub_scaled;
    }
    Ok(a)
}

fn condition_number(a: &DMatrix<f64>) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Variance-minimizing weights under both bias constraints.
///
/// Solves the KKT system by LU with partial pivoting, then checks the
/// constraints and that `w_n` equals its closed form.
pub fn optimal_weights(plan: &SubsamplePlan, alpha: f64, cov: &CovarianceBundle) -> Result<JackknifeWeights> {
    let a = kkt_matrix(plan, alpha, cov)?;
    let dim = a.nrows();
    let mut b = DVector::zeros(dim);
    b[0] = 1.0;
    let lu = a.clone().lu();
    let x = match lu.solve(&b) {
        Some(x) if x.iter().all(|v| v.is_finite()) => x,
        _ => return Err(Error::Singular { condition: condition_number(&a) }),
    };
    let cond = condition_number(&a);
    if !(cond < 1e14) {
        return Err(Error::Singular { condition: cond });
    }
    let m = plan.m;
    let w = JackknifeWeights {
        w_n: x[0],
        w_sub: x.as_slice()[1..=m].to_vec(),
        delta1: Some(x[m + 1]),
        delta2: Some(x[m + 2]),
        provenance: Provenance::Optimal,
    };
    let r = BandwidthRatios::new(plan, alpha)?;
    let closed = r.closed_form_wn()?;
    if (w.w_n - closed).abs() > CLOSED_FORM_TOL
        || w.g1_residual().abs() > CONSTRAINT_TOL
        || w.g2_residual(&r).abs() > CONSTRAINT_TOL
    {
        return Err(Error::ClosedFormMismatch { solved: w.w_n, closed_form: closed });
    }
    Ok(w)
}

/// Leading principal minors of the bordered Hessian, ordered
/// `(delta1, delta2, w_n, w_1..w_m)`, for orders `4..=m+3` (the order-3 minor
/// vanishes identically because the two border rows are only paired with one
/// choice variable). Returned as `(order, determinant)` pairs.
pub fn bordered_hessian_minors(plan: &SubsamplePlan, alpha: f64, cov: &CovarianceBundle) -> Result<Vec<(usize, f64)>> {
    let h = bordered_hessian(plan, alpha, cov)?;
    Ok((4..=h.nrows()).map(|k| (k, h.view((0, 0), (k, k)).determinant())).collect())
}

/// Bordered Hessian of the Lagrangian.
pub fn bordered_hessian(plan: &SubsamplePlan, alpha: f64, cov: &CovarianceBundle) -> Result<DMatrix<f64>> {
    let a = kkt_matrix(plan, alpha, cov)?;
    let m = plan.m;
    let dim = m + 3;
    // Reorder so the multipliers come first; the sign of each multiplier
    // column in the KKT rows is folded into the border.
    let order: Vec<usize> = [m + 1, m + 2].into_iter().chain(0..=m).collect();
    let mut h = DMatrix::zeros(dim, dim);
    let r = BandwidthRatios::new(plan, alpha)?;
    for (ri, &vi) in order.iter().enumerate() {
        for (ci, &vj) in order.iter().enumerate() {
            h[(ri, ci)] = match (vi > m, vj > m) {
                (true, true) => 0.0,
                (true, false) | (false, true) => {
                    let (mult, var) = if vi > m { (vi, vj) } else { (vj, vi) };
                    border(mult - m - 1, var, &r)
                }
                (false, false) => {
                    // Hessian block: rows 2.. of the KKT system hold it.
                    a[(vi + 2, vj)]
                }
            };
        }
    }
    Ok(h)
}

/// Gradient of constraint `k` with respect to variable `var` (0 = w_n).
fn border(k: usize, var: usize, r: &BandwidthRatios) -> f64 {
    match (k, var) {
        (0, 0) => 1.0,
        (0, _) => -1.0,
        (_, 0) => r.full,
        (_, _) => -r.sub_scaled,
    }
}
