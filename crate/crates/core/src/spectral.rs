//! Fourier frequencies, periodograms and log-periodogram regressors.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Series at least this long use the FFT; shorter ones use the direct sum.
pub const FFT_THRESHOLD: usize = 256;

/// `floor(n^alpha)`, snapping to the nearest integer when `n^alpha` is within
/// 1e-9 (relative) of it so that exact powers are not lost to rounding.
pub fn bandwidth(n: usize, alpha: f64) -> Result<usize> {
    if n < 4 || !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("bandwidth needs n >= 4 and 0 < alpha < 1, got n = {n}, alpha = {alpha}")));
    }
    let k = floor_snapped((n as f64).powf(alpha));
    if k < 2 {
        return Err(Error::Bandwidth { n, bandwidth: k });
    }
    Ok(k)
}

/// Floor with a relative snap of 1e-9 towards the nearest integer.
pub fn floor_snapped(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r as usize
    } else {
        x.floor() as usize
    }
}

/// The first `big_n` Fourier frequencies `2 pi j / n` of a sample of length `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub n: usize,
    pub alpha: f64,
    pub big_n: usize,
    pub lambdas: Vec<f64>,
}

impl SpectralGrid {
    /// Grid with `N = floor(n^alpha)` frequencies.
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        let big_n = bandwidth(n, alpha)?;
        Self::with_bandwidth(n, alpha, big_n)
    }

    /// Grid with an explicit frequency count.
    pub fn with_bandwidth(n: usize, alpha: f64, big_n: usize) -> Result<Self> {
        if big_n < 2 {
            return Err(Error::Bandwidth { n, bandwidth: big_n });
        }
        if 2 * big_n >= n {
            return Err(Error::Domain(format!("bandwidth {big_n} must be below n/2 = {}", n / 2)));
        }
        let lambdas = (1..=big_n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
        Ok(Self { n, alpha, big_n, lambdas })
    }
}

/// Log-periodogram regressors `x_j = log(2 sin(l_j / 2))` and their centered form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LprRegressors {
    pub x: Vec<f64>,
    pub xbar: f64,
    pub a: Vec<f64>,
    pub sxx: f64,
}

impl LprRegressors {
    pub fn new(grid: &SpectralGrid) -> Self {
        let x: Vec<f64> = grid.lambdas.iter().map(|l| (2.0 * (0.5 * l).sin()).ln()).collect();
        let xbar = x.iter().sum::<f64>() / x.len() as f64;
        let a: Vec<f64> = x.iter().map(|v| v - xbar).collect();
        let sxx = a.iter().map(|v| v * v).sum();
        Self { x, xbar, a, sxx }
    }
}

/// Periodogram ordinates at the grid frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodogramSet {
    pub values: Vec<f64>,
    pub grid: SpectralGrid,
}

/// `I(l_j) = |sum_t y_t e^{-i l_j t}|^2 / (2 pi n)` for `j = 1..=count` by direct
/// summation.
pub fn periodogram_direct(series: &[f64], count: usize) -> Vec<f64> {
    let n = series.len();
    let norm = 1.0 / (2.0 * PI * n as f64);
    (1..=count)
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, y) in series.iter().enumerate() {
                // Reduce j * t modulo n so the phase is computed exactly.
                let k = (j * (t + 1)) % n;
                acc += Complex64::from_polar(*y, -2.0 * PI * k as f64 / n as f64);
            }
            acc.norm_sqr() * norm
        })
        .collect()
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Same ordinates as [`periodogram_direct`] via a length-`n` FFT.
pub fn periodogram_fft(series: &[f64], count: usize) -> Vec<f64> {
    let n = series.len();
    let mut buf: Vec<Complex64> = series.iter().map(|&y| Complex64::new(y, 0.0)).collect();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n));
    fft.process(&mut buf);
    let norm = 1.0 / (2.0 * PI * n as f64);
    buf[1..=count].iter().map(|z| z.norm_sqr() * norm).collect()
}

/// Periodogram on `grid`; FFT for long series, direct sum otherwise.
pub fn periodogram(series: &[f64], grid: &SpectralGrid) -> Result<PeriodogramSet> {
    if series.len() != grid.n {
        return Err(Error::LengthMismatch { expected: grid.n, got: series.len() });
    }
    let values = if grid.n >= FFT_THRESHOLD {
        periodogram_fft(series, grid.big_n)
    } else {
        periodogram_direct(series, grid.big_n)
    };
    Ok(PeriodogramSet { values, grid: grid.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bandwidth_values() {
        assert_eq!(bandwidth(96, 0.65).unwrap(), 19);
        assert_eq!(bandwidth(576, 0.65).unwrap(), 62);
        assert_eq!(bandwidth(48, 0.65).unwrap(), 12);
        assert_eq!(bandwidth(64, 0.5).unwrap(), 8);
        assert!(bandwidth(5, 0.1).is_err());
        assert!(bandwidth(96, 1.0).is_err());
    }

    #[test]
    fn regressors_small_grid() {
        let g = SpectralGrid::with_bandwidth(8, 0.5, 2).unwrap();
        let r = LprRegressors::new(&g);
        assert_relative_eq!(r.x[0], (2.0 * (PI / 8.0).sin()).ln());
        assert_relative_eq!(r.x[1], (2.0 * (PI / 4.0).sin()).ln());
        assert!(r.a.iter().sum::<f64>().abs() < 1e-15);
    }

    #[test]
    fn fft_matches_direct() {
        let y: Vec<f64> = (0..300).map(|t| ((t * 37 % 101) as f64 * 0.13).sin() + 0.01 * t as f64).collect();
        let a = periodogram_direct(&y, 140);
        let b = periodogram_fft(&y, 140);
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() <= 1e-10 * u.abs().max(1e-300), "{u} vs {v}");
        }
    }

    #[test]
    fn constant_series_has_zero_ordinates() {
        let g = SpectralGrid::new(96, 0.65).unwrap();
        let p = periodogram(&vec![3.5; 96], &g).unwrap();
        assert!(p.values.iter().all(|v| *v < 1e-25));
        assert!(periodogram(&[1.0; 10], &g).is_err());
    }

    #[test]
    fn cosine_peak() {
        let n = 64;
        let l1 = 2.0 * PI / n as f64;
        let y: Vec<f64> = (1..=n).map(|t| (l1 * t as f64).cos()).collect();
        let p = periodogram_direct(&y, 3);
        assert_relative_eq!(p[0], n as f64 / (8.0 * PI), max_relative = 1e-12);
    }
}
