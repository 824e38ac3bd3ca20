use std::f64::consts::PI;

use lpr_jackknife::altestimators::{gs_fit, GsConfig, GsDesign};
use lpr_jackknife::arfima::{fractional_noise_acvf, simulate, ArfimaModel};
use lpr_jackknife::harness::summary::{fmt_sig6, round_sig6};
use lpr_jackknife::jackknife::estimate::combine;
use lpr_jackknife::jackknife::weights::BandwidthRatios;
use lpr_jackknife::jackknife::{
    chambers_weights, estimator_covariances, jackknife_estimate, optimal_weights, subsample, JackknifeWeights, Scheme,
    SubsamplePlan,
};
use lpr_jackknife::lpr::lpr_estimate;
use lpr_jackknife::specfun::{digamma, dirichlet_kernel, dirichlet_kernel_abs2, log_periodogram_cov, SeriesControl};
use lpr_jackknife::spectral::periodogram_direct;
use lpr_jackknife::toeplitz::durbin_levinson;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn white(seed: u64, n: usize) -> Vec<f64> {
    simulate(&ArfimaModel::fractional_noise(0.0).unwrap(), n, &mut ChaCha20Rng::seed_from_u64(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dirichlet_modulus_is_bounded_and_matches(t in 1usize..60, lambda in -10.0f64..10.0) {
        let k = dirichlet_kernel(t, lambda).unwrap();
        let a2 = dirichlet_kernel_abs2(t, lambda).unwrap();
        prop_assert!((k.norm_sqr() - a2).abs() <= 1e-9 * (t * t) as f64);
        prop_assert!(a2 <= (t * t) as f64 * (1.0 + 1e-12));
        prop_assert!((a2 - dirichlet_kernel_abs2(t, -lambda).unwrap()).abs() <= 1e-9 * (t * t) as f64);
        prop_assert!((a2 - dirichlet_kernel_abs2(t, lambda + 2.0 * PI).unwrap()).abs() <= 1e-8 * (t * t) as f64);
    }

    #[test]
    fn digamma_recurrence(x in 0.01f64..50.0) {
        let lhs = digamma(x + 1.0).unwrap();
        let rhs = digamma(x).unwrap() + 1.0 / x;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn log_covariance_is_nonnegative_and_rises_on_low_correlations(a in 0.0f64..0.6, b in 0.0f64..0.6) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let ctl = SeriesControl::default();
        let (vlo, vhi) = (log_periodogram_cov(lo, ctl).unwrap().value, log_periodogram_cov(hi, ctl).unwrap().value);
        prop_assert!(vlo >= 0.0);
        prop_assert!(vhi >= vlo - 1e-14);
        prop_assert!(vhi <= PI * PI / 6.0);
    }

    #[test]
    fn periodogram_sums_to_centered_energy(seed in any::<u64>(), n in 8usize..80) {
        let y = white(seed, n);
        let mean = y.iter().sum::<f64>() / n as f64;
        let energy: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
        let total: f64 = periodogram_direct(&y, n - 1).iter().sum();
        prop_assert!((total * 2.0 * PI - energy).abs() <= 1e-9 * energy);
    }

    #[test]
    fn periodogram_ignores_reversal_and_shift(seed in any::<u64>(), c in -100.0f64..100.0) {
        let y = white(seed, 64);
        let mut rev = y.clone();
        rev.reverse();
        let shifted: Vec<f64> = y.iter().map(|v| v + c).collect();
        let (a, b, s) = (periodogram_direct(&y, 31), periodogram_direct(&rev, 31), periodogram_direct(&shifted, 31));
        for j in 0..31 {
            prop_assert!((a[j] - b[j]).abs() <= 1e-9 * a[j].max(1e-6));
            prop_assert!((a[j] - s[j]).abs() <= 1e-7 * (1.0 + c.abs()) * a[j].max(1e-3));
        }
    }

    #[test]
    fn lpr_is_location_and_scale_invariant(seed in any::<u64>(), c in -50.0f64..50.0, s in 0.01f64..100.0) {
        let y = white(seed, 300);
        let moved: Vec<f64> = y.iter().map(|v| s * v + c).collect();
        let (a, b) = (lpr_estimate(&y, 0.65).unwrap().d, lpr_estimate(&moved, 0.65).unwrap().d);
        prop_assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn chambers_weights_satisfy_constraints(l in 6usize..120, m in 2usize..9, alpha in 0.55f64..0.8) {
        let n = l * m;
        let plan = SubsamplePlan::new(Scheme::NonOverlapping, n, m).unwrap();
        let (Ok(w), Ok(r)) = (chambers_weights(&plan, alpha), BandwidthRatios::new(&plan, alpha)) else {
            return Ok(());
        };
        prop_assert!(w.g1_residual().abs() <= 1e-10);
        prop_assert!(w.g2_residual(&r).abs() <= 1e-10);
    }

    #[test]
    fn fractional_noise_toeplitz_is_positive_definite(d in -0.49f64..0.49) {
        let g = fractional_noise_acvf(d, 200).unwrap();
        let mut last = f64::INFINITY;
        durbin_levinson(&g, 201, |_, _, v| {
            assert!(v > 0.0 && v <= last * (1.0 + 1e-12));
            last = v;
        }).unwrap();
    }

    #[test]
    fn no_blocks_partition_the_series(l in 1usize..40, m in 2usize..8) {
        let y: Vec<f64> = (0..l * m).map(|t| t as f64).collect();
        let plan = SubsamplePlan::new(Scheme::NonOverlapping, l * m, m).unwrap();
        let joined: Vec<f64> = subsample(&y, &plan).unwrap().concat();
        prop_assert_eq!(joined, y);
    }

    #[test]
    fn equal_estimates_pass_through(c in -1.0f64..1.0, m in 2usize..9) {
        let plan = SubsamplePlan::new(Scheme::NonOverlapping, 96 * m, m).unwrap();
        let w = chambers_weights(&plan, 0.65).unwrap();
        let out = combine(c, &vec![c; m], &w).unwrap();
        prop_assert!((out - c).abs() <= 1e-12);
    }

    #[test]
    fn sig6_rounding_is_idempotent(x in -1e6f64..1e6) {
        let r = round_sig6(x);
        prop_assert_eq!(round_sig6(r), r);
        prop_assert_eq!(fmt_sig6(r), fmt_sig6(x));
    }
}

#[test]
fn jackknife_is_location_and_scale_invariant() {
    let y = white(5, 576);
    let moved: Vec<f64> = y.iter().map(|v| 3.5 * v - 12.0).collect();
    for scheme in [Scheme::NonOverlapping, Scheme::MovingBlock] {
        let plan = SubsamplePlan::new(scheme, 576, 3).unwrap();
        let w = chambers_weights(&plan, 0.65).unwrap();
        let (a, b) = (jackknife_estimate(&y, &plan, &w, 0.65).unwrap(), jackknife_estimate(&moved, &plan, &w, 0.65).unwrap());
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn degenerate_weights_give_plain_lpr() {
    let y = white(9, 576);
    let plan = SubsamplePlan::new(Scheme::NonOverlapping, 576, 2).unwrap();
    let w = JackknifeWeights::from_raw(1.0, vec![0.0, 0.0]);
    assert_eq!(jackknife_estimate(&y, &plan, &w, 0.65).unwrap(), lpr_estimate(&y, 0.65).unwrap().d);
}

#[test]
fn optimal_weights_hold_constraints_across_grid() {
    let models = [
        ArfimaModel::new(0.0, vec![0.4], vec![]).unwrap(),
        ArfimaModel::new(0.25, vec![0.9], vec![]).unwrap(),
        ArfimaModel::new(-0.25, vec![], vec![0.4]).unwrap(),
    ];
    for model in &models {
        for n in [96, 576] {
            for m in [2, 3, 4, 6, 8] {
                let plan = SubsamplePlan::new(Scheme::NonOverlapping, n, m).unwrap();
                let cov = estimator_covariances(model, n, &plan, 0.65).unwrap();
                let w = optimal_weights(&plan, 0.65, &cov).unwrap();
                let r = BandwidthRatios::new(&plan, 0.65).unwrap();
                assert!(w.g1_residual().abs() <= 1e-10);
                assert!(w.g2_residual(&r).abs() <= 1e-10);
                let spread = w.w_sub.iter().fold(0.0f64, |a, x| a.max((x - w.w_sub[0]).abs()));
                assert!(spread <= 1e-10, "sub-weights differ by {spread}");
            }
        }
    }
}

#[test]
fn intercept_only_gs_is_weighted_mean() {
    let y = white(21, 576);
    let cfg = GsConfig { design: GsDesign::InterceptOnly, ..GsConfig::default() };
    let fit = gs_fit(&y, &cfg).unwrap();
    let q = &cfg.q_grid;
    let k = q.len();
    let omega = nalgebra::DMatrix::from_fn(k, k, |i, j| 1.0 / q[i].max(q[j]));
    let inv = omega.try_inverse().unwrap();
    let ones = nalgebra::DVector::from_element(k, 1.0);
    let y_vec = nalgebra::DVector::from_vec(fit.constituents.clone());
    let want = (ones.transpose() * &inv * y_vec)[0] / (ones.transpose() * &inv * &ones)[0];
    assert!((fit.d - want).abs() < 1e-10, "{} vs {want}", fit.d);
}
