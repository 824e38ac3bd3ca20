//! Statistical checks on small simulation studies. Tolerances are multiples
//! of the Monte Carlo standard error.

use std::f64::consts::PI;

use lpr_jackknife::altestimators::{fit_mle, FixedShort};
use lpr_jackknife::arfima::{fractional_noise_acvf, simulate, ArfimaModel};
use lpr_jackknife::lpr::{lpr_estimate, LprPlan};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}

fn draws(model: &ArfimaModel, n: usize, reps: u64, seed: u64) -> impl Iterator<Item = Vec<f64>> + '_ {
    (0..reps).map(move |r| {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(r);
        simulate(model, n, &mut rng).unwrap()
    })
}

#[test]
fn white_noise_lpr_is_centred_with_finite_sample_variance() {
    let white = ArfimaModel::fractional_noise(0.0).unwrap();
    let plan = LprPlan::new(576, 0.65).unwrap();
    let est: Vec<f64> = draws(&white, 576, 1000, 11).map(|y| plan.estimate(&y).unwrap().d).collect();
    let (m, sd) = mean_sd(&est);
    assert!(m.abs() <= 3.0 * sd / (est.len() as f64).sqrt(), "mean {m}");
    // Log-chi-square variance pi^2/6 over 4 S_xx.
    let want = PI * PI / (24.0 * plan.regs.sxx);
    assert!((sd * sd / want - 1.0).abs() <= 0.2, "variance {} vs {want}", sd * sd);
}

#[test]
fn simulated_ar1_has_the_right_lag_one_correlation() {
    let model = ArfimaModel::new(0.0, vec![0.4], vec![]).unwrap();
    let r1: Vec<f64> = draws(&model, 500, 200, 3)
        .map(|y| {
            let g0: f64 = y.iter().map(|v| v * v).sum();
            let g1: f64 = y.windows(2).map(|w| w[0] * w[1]).sum();
            g1 / g0
        })
        .collect();
    let (m, _) = mean_sd(&r1);
    assert!((m + 0.4).abs() < 0.02, "lag-1 correlation {m}");
}

#[test]
fn simulated_fractional_noise_has_the_right_variance() {
    let d = 0.25;
    let model = ArfimaModel::fractional_noise(d).unwrap();
    let g0 = fractional_noise_acvf(d, 0).unwrap()[0];
    let ms: Vec<f64> = draws(&model, 400, 300, 5).map(|y| y.iter().map(|v| v * v).sum::<f64>() / 400.0).collect();
    let (m, sd) = mean_sd(&ms);
    assert!((m - g0).abs() <= 3.0 * sd / (ms.len() as f64).sqrt(), "{m} vs {g0}");
}

#[test]
fn mle_beats_lpr_on_fractional_noise() {
    let d0 = 0.25;
    let model = ArfimaModel::fractional_noise(d0).unwrap();
    let (mut mle, mut lpr) = (Vec::new(), Vec::new());
    for y in draws(&model, 1024, 100, 8) {
        mle.push(fit_mle(&y, 0, 0, None).unwrap().d - d0);
        lpr.push(lpr_estimate(&y, 0.65).unwrap().d - d0);
    }
    let rmse = |e: &[f64]| (e.iter().map(|v| v * v).sum::<f64>() / e.len() as f64).sqrt();
    let (bias, sd) = mean_sd(&mle);
    assert!(bias < 3.0 * sd / 10.0 && bias > -0.05, "MLE bias {bias}");
    assert!(rmse(&mle) < rmse(&lpr), "{} vs {}", rmse(&mle), rmse(&lpr));
}

#[test]
fn known_short_memory_mle_is_not_worse() {
    let model = ArfimaModel::new(0.0, vec![0.4], vec![]).unwrap();
    let fixed = FixedShort { ar: vec![0.4], ma: vec![] };
    let (mut known, mut estimated) = (Vec::new(), Vec::new());
    for y in draws(&model, 192, 60, 13) {
        known.push(fit_mle(&y, 1, 0, Some(&fixed)).unwrap().d.powi(2));
        estimated.push(fit_mle(&y, 1, 0, None).unwrap().d.powi(2));
    }
    let diff: Vec<f64> = estimated.iter().zip(&known).map(|(e, k)| e - k).collect();
    let (m, sd) = mean_sd(&diff);
    assert!(m >= -3.0 * sd / (diff.len() as f64).sqrt(), "mse gap {m}");
}

/// Compares the covariance series with simulated log-exponential pairs whose
/// underlying complex Gaussians have squared correlation `rho2`. The classical
/// value is the dilogarithm `sum rho2^k / k^2`. Printed, not asserted.
#[test]
fn log_covariance_diagnostic() {
    use lpr_jackknife::specfun::{log_periodogram_cov, SeriesControl};
    use rand_distr::{Distribution, StandardNormal};

    let mut rng = ChaCha20Rng::seed_from_u64(77);
    let reps = 200_000;
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    for rho2 in [0.05, 0.25, 0.5, 0.8] {
        let rho: f64 = f64::sqrt(rho2);
        let c = (1.0 - rho2).sqrt();
        let (mut a, mut b) = (Vec::with_capacity(reps), Vec::with_capacity(reps));
        for _ in 0..reps {
            let (x1, y1, x2, y2) = (normal(), normal(), normal(), normal());
            a.push((0.5 * (x1 * x1 + y1 * y1)).ln());
            let (u, v) = (rho * x1 + c * x2, rho * y1 + c * y2);
            b.push((0.5 * (u * u + v * v)).ln());
        }
        let (ma, _) = mean_sd(&a);
        let (mb, _) = mean_sd(&b);
        let cov = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (reps as f64 - 1.0);
        let series = log_periodogram_cov(rho2, SeriesControl::default()).unwrap().value;
        let dilog: f64 = (1..2000).map(|k| rho2.powi(k) / (k * k) as f64).sum();
        println!("rho2={rho2}: simulated {cov:.5}, series {series:.5}, dilogarithm {dilog:.5}");
        assert!(cov.is_finite() && series.is_finite());
    }
}
