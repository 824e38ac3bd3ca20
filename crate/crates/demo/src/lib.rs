//! Browser bindings: spectral density curves, a simulated LPR fit with its
//! jackknife correction, and Chambers weights across sub-sample counts.

use lpr_jackknife::arfima::{simulate, spectral_density, ArfimaModel};
use lpr_jackknife::jackknife::{chambers_weights, JackknifeSetup, Scheme, SubsamplePlan};
use lpr_jackknife::lpr::{log_ordinates, LprPlan};
use lpr_jackknife::spectral::periodogram;
use lpr_jackknife::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use wasm_bindgen::prelude::*;

const SUB_COUNTS: [usize; 5] = [2, 3, 4, 6, 8];

fn model(d: f64, phi: f64, theta: f64) -> Result<ArfimaModel> {
    let ar = if phi == 0.0 { vec![] } else { vec![phi] };
    let ma = if theta == 0.0 { vec![] } else { vec![theta] };
    ArfimaModel::new(d, ar, ma)
}

fn js(e: lpr_jackknife::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `points` pairs `(lambda, log f(lambda))` on `(0, pi]`, flattened.
pub fn log_spectrum(d: f64, phi: f64, theta: f64, points: usize) -> Result<Vec<f64>> {
    let m = model(d, phi, theta)?;
    let mut out = Vec::with_capacity(2 * points);
    for k in 1..=points {
        let lambda = std::f64::consts::PI * k as f64 / points as f64;
        out.push(lambda);
        out.push(spectral_density(&m, lambda)?.ln());
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn spectrum_curve(d: f64, phi: f64, theta: f64, points: usize) -> std::result::Result<Vec<f64>, JsError> {
    log_spectrum(d, phi, theta, points).map_err(js)
}

/// One simulated series and everything needed to plot its LPR fit.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Fit {
    series: Vec<f64>,
    regressor: Vec<f64>,
    log_periodogram: Vec<f64>,
    d_lpr: f64,
    d_sub: Vec<f64>,
    d_jack: f64,
}

#[wasm_bindgen]
impl Fit {
    pub fn series(&self) -> Vec<f64> {
        self.series.clone()
    }

    /// `log(2 sin(lambda_j / 2))` at the regression frequencies.
    pub fn regressor(&self) -> Vec<f64> {
        self.regressor.clone()
    }

    pub fn log_periodogram(&self) -> Vec<f64> {
        self.log_periodogram.clone()
    }

    pub fn d_lpr(&self) -> f64 {
        self.d_lpr
    }

    pub fn d_sub(&self) -> Vec<f64> {
        self.d_sub.clone()
    }

    pub fn d_jack(&self) -> f64 {
        self.d_jack
    }
}

#[allow(clippy::too_many_arguments)]
pub fn fit(d: f64, phi: f64, theta: f64, n: usize, alpha: f64, m: usize, seed: u64) -> Result<Fit> {
    let series = simulate(&model(d, phi, theta)?, n, &mut ChaCha20Rng::seed_from_u64(seed))?;
    let plan = LprPlan::new(n, alpha)?;
    let log_periodogram = log_ordinates(&series, &periodogram(&series, &plan.grid)?.values)?;
    let sub = SubsamplePlan::new(Scheme::NonOverlapping, n, m)?;
    let detail = JackknifeSetup::new(&sub, alpha)?.estimate(&series, &chambers_weights(&sub, alpha)?)?;
    Ok(Fit {
        regressor: plan.regs.x.clone(),
        log_periodogram,
        d_lpr: detail.d_full,
        d_sub: detail.d_sub,
        d_jack: detail.d_jack,
        series,
    })
}

#[wasm_bindgen]
pub fn simulate_fit(
    d: f64,
    phi: f64,
    theta: f64,
    n: usize,
    alpha: f64,
    m: usize,
    seed: u64,
) -> std::result::Result<Fit, JsError> {
    fit(d, phi, theta, n, alpha, m, seed).map_err(js)
}

/// Triples `(m, w_n, sum of sub-sample weights)` for each usable `m`, flattened.
pub fn weights_table(n: usize, alpha: f64) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for m in SUB_COUNTS.into_iter().filter(|m| n.is_multiple_of(*m)) {
        let plan = SubsamplePlan::new(Scheme::NonOverlapping, n, m)?;
        let w = chambers_weights(&plan, alpha)?;
        out.extend([m as f64, w.w_n, w.w_sub.iter().sum()]);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn weights_by_m(n: usize, alpha: f64) -> std::result::Result<Vec<f64>, JsError> {
    weights_table(n, alpha).map_err(js)
}
