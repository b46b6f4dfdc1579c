use statrs::distribution::{ContinuousCDF, Normal};

use weak_em::em::em_terminal_batch;
use weak_em::experiment::{girsanov_cross_check, test_function_get, CrossCheckSettings};
use weak_em::girsanov::{
    check_lambda_horizon, check_weak_rate_condition, exp_moment_estimate, exp_moment_samples,
    weighted_expectation, weights_along_path, WeightVariant, NOVIKOV_LAMBDA,
};
use weak_em::sim::mean_and_se;
use weak_em::stream::{brownian_path, gaussian_increments, path_stream};
use weak_em::{catalog_get, make_time_grid, DriftSpec, Error, Params, SigmaSpec, SimConfig};

fn params(kv: &[(&str, f64)]) -> Params {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn drift(name: &str, kv: &[(&str, f64)]) -> DriftSpec {
    catalog_get(name, &params(kv)).unwrap()
}

fn id(d: usize) -> SigmaSpec {
    SigmaSpec::identity(d).unwrap()
}

#[test]
fn lambda_check_examples() {
    let s = id(1);
    let l = check_lambda_horizon(0.5, 1.0, 1.0, &s);
    assert_eq!(l.lhs, 0.5);
    assert!(l.pass);
    let l = check_lambda_horizon(1.0, 1.0, 1.0, &s);
    assert_eq!(l.lhs, 2.0);
    assert!(!l.pass);
    for t in [0.1, 1.0, 100.0] {
        let l = check_lambda_horizon(t, 3.0, 0.0, &s);
        assert!(l.pass);
        assert_eq!(l.margin, 1.0);
    }
    let degenerate = check_lambda_horizon(0.0, 1.0, 5.0, &s);
    assert!(degenerate.pass && degenerate.margin == 1.0);
    // ‖σ‖‖σ⁻¹‖ enters squared
    let aniso = SigmaSpec::from_rows(&[vec![2.0, 0.0], vec![0.0, 0.5]]).unwrap();
    assert_eq!(check_lambda_horizon(0.5, 1.0, 1.0, &aniso).lhs, 0.5 * 16.0);
}

#[test]
fn lambda_margin_strictly_decreasing() {
    let s = id(1);
    let grid = [0.1, 0.2, 0.4, 0.8, 1.6];
    for &a in &grid {
        for &b in &grid {
            for w in grid.windows(2) {
                let m = |t, lam, l2| check_lambda_horizon(t, lam, l2, &s).margin;
                assert!(m(w[1], a, b) < m(w[0], a, b));
                assert!(m(a, w[1], b) < m(a, w[0], b));
                assert!(m(a, b, w[1]) < m(a, b, w[0]));
            }
        }
    }
}

#[test]
fn weak_rate_condition_consistency() {
    let s = id(1);
    let target = 1.0 / 30f64.sqrt();
    let c = check_weak_rate_condition(0.15, 1.0, &s, 2.0).unwrap();
    assert!(c.pass && (c.max_horizon - target).abs() < 1e-12);
    assert!(!check_weak_rate_condition(0.5, 1.0, &s, 2.0).unwrap().pass);
    let bounded = check_weak_rate_condition(1e6, 0.0, &s, 2.0).unwrap();
    assert!(bounded.pass && bounded.max_horizon.is_infinite());
    assert!(check_weak_rate_condition(0.1, 1.0, &s, 1.5).is_err());
    for t in (1..=40).map(|k| k as f64 * 0.025) {
        for l2 in [0.0, 0.25, 0.5, 1.0, 2.0, 4.0] {
            for p0 in [2.0, 2.5, 3.0, 4.0, 8.0] {
                let c = check_weak_rate_condition(t, l2, &s, p0).unwrap();
                assert_eq!(c.pass, t < c.max_horizon, "T {t} L2 {l2} p0 {p0}");
                let k = (2.0 * (p0 + 1.0) * (p0 + 3.0)).sqrt() / (p0 - 1.0);
                assert!(c.max_horizon == f64::INFINITY || (c.max_horizon * l2 * k - 1.0).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn zero_drift_weights_are_one() {
    let grid = make_time_grid(1.0, 1.0 / 64.0).unwrap();
    let incs = gaussian_increments(&grid, 2, &mut path_stream(1, 0));
    for v in [WeightVariant::Continuous, WeightVariant::Frozen { delta: 0.125 }] {
        let w = weights_along_path(&drift("zero", &[("dim", 2.0)]), &id(2), &[0.0, 1.0], &grid, &incs, v)
            .unwrap();
        assert_eq!(w.log_weight, 0.0);
        assert_eq!(w.weight(), 1.0);
    }
}

#[test]
fn constant_drift_weight_identity() {
    let c = 0.7;
    let b = drift("linear", &[("a", c), ("lambda", 0.0)]);
    let t = 0.8;
    let grid = make_time_grid(t, t / 128.0).unwrap();
    let mut weights = Vec::new();
    for i in 0..100_000u64 {
        let incs = gaussian_increments(&grid, 1, &mut path_stream(2, i));
        let w_t = *brownian_path(&incs, 1).last().unwrap();
        let s = weights_along_path(&b, &id(1), &[0.0], &grid, &incs, WeightVariant::Continuous)
            .unwrap();
        if i < 100 {
            assert!((s.ito_term - c * w_t).abs() < 1e-12);
            assert!((s.quad_term - 0.5 * c * c * t).abs() < 1e-12);
        }
        weights.push(s.weight());
    }
    let (m, se) = mean_and_se(&weights);
    assert!((m - 1.0).abs() <= 3.0 * se, "E R = {m} ± {se}");
}

#[test]
fn variants_coincide_when_delta_is_the_step() {
    let b = drift("svc", &[]);
    let grid = make_time_grid(0.5, 0.5 / 256.0).unwrap();
    for i in 0..20u64 {
        let incs = gaussian_increments(&grid, 1, &mut path_stream(3, i));
        let r1 = weights_along_path(&b, &id(1), &[0.4], &grid, &incs, WeightVariant::Continuous)
            .unwrap();
        let r2 = weights_along_path(
            &b,
            &id(1),
            &[0.4],
            &grid,
            &incs,
            WeightVariant::Frozen { delta: 0.5 / 256.0 },
        )
        .unwrap();
        assert_eq!(r1.log_weight, r2.log_weight);
    }
}

#[test]
fn weighted_symmetry_and_ou_mean() {
    let cfg = SimConfig::new(1.0, 1.0 / 16.0, vec![0.0], 100_000, 4);
    let w = weighted_expectation(&drift("zero", &[]), &id(1), &cfg, |x| (x[0] > 0.0) as u8 as f64, WeightVariant::Continuous)
        .unwrap();
    assert!((w.estimate - 0.5).abs() <= 3.0 * w.std_err);
    assert_eq!(w.mean_weight, 1.0);

    let t = 0.15;
    let cfg = SimConfig::new(t, t / 4096.0, vec![1.0], 100_000, 5);
    let w = weighted_expectation(&drift("linear", &[]), &id(1), &cfg, |x| x[0], WeightVariant::Continuous)
        .unwrap();
    assert!((w.estimate - (-t).exp()).abs() <= 3.0 * w.std_err, "{w:?}");
}

#[test]
fn novikov_precondition() {
    let cfg = SimConfig::new(2.0, 0.01, vec![0.0], 10, 1);
    let r = weighted_expectation(&drift("linear", &[]), &id(1), &cfg, |x| x[0], WeightVariant::Continuous);
    assert!(matches!(r, Err(Error::Precondition(_))));
    let settings = CrossCheckSettings {
        horizon: 2.0,
        delta: 0.25,
        x0: vec![0.0],
        n_paths: 10,
        master_seed: 1,
        n_workers: 1,
    };
    let f = test_function_get("sin", &Params::new()).unwrap();
    let rec = girsanov_cross_check(&drift("linear", &[]), &id(1), &f, &settings).unwrap();
    assert!(rec.skipped.is_some());
    assert!(!rec.agrees(3.0));
}

#[test]
fn martingale_mean_for_catalog_drifts() {
    let cases = [
        drift("svc", &[]),
        drift("holder", &[("beta", 0.5)]),
        drift("indicator", &[]),
        drift("weierstrass", &[("beta", 0.5)]),
        drift("linear", &[("a", 0.5), ("lambda", 1.0)]),
    ];
    for d in &cases {
        let t = 0.5;
        assert!(check_lambda_horizon(t, NOVIKOV_LAMBDA, d.effective_l2(), &id(1)).pass);
        let cfg = SimConfig::new(t, t / 4096.0, vec![0.3], 20_000, 6);
        let w = weighted_expectation(d, &id(1), &cfg, |_| 1.0, WeightVariant::Continuous).unwrap();
        assert!(
            (w.mean_weight - 1.0).abs() <= 3.0 * w.weight_std_err,
            "{}: {} ± {}",
            d.name(),
            w.mean_weight,
            w.weight_std_err
        );
    }
}

#[test]
fn measure_change_consistency() {
    let t = 0.5;
    let fs = [
        test_function_get("indicator", &params(&[("c", 0.5)])).unwrap(),
        test_function_get("sin", &Params::new()).unwrap(),
        test_function_get("clamp", &params(&[("a", 0.75)])).unwrap(),
    ];
    for d in [drift("svc", &[]), drift("holder", &[("beta", 0.5)])] {
        let fine = SimConfig::new(t, t / 4096.0, vec![0.5], 30_000, 7);
        let direct_cfg = SimConfig::new(t, t / 1024.0, vec![0.5], 30_000, 8);
        let direct = em_terminal_batch(&d, &id(1), &direct_cfg).unwrap();
        for f in &fs {
            let w = weighted_expectation(&d, &id(1), &fine, |x| f.eval(x), WeightVariant::Continuous)
                .unwrap();
            let vals: Vec<f64> = direct.iter().map(|x| f.eval(x)).collect();
            let (m, se) = mean_and_se(&vals);
            let joint = (se * se + w.std_err * w.std_err).sqrt();
            assert!(
                (w.estimate - m).abs() <= 3.0 * joint,
                "{} {}: {} vs {m} (joint se {joint})",
                d.name(),
                f.name(),
                w.estimate
            );
        }
    }
}

#[test]
fn cross_check_zero_and_svc() {
    let f = test_function_get("indicator", &params(&[("c", 0.5)])).unwrap();
    let mut settings = CrossCheckSettings {
        horizon: 0.5,
        delta: 2f64.powi(-5),
        x0: vec![0.5],
        n_paths: 100_000,
        master_seed: 9,
        n_workers: 1,
    };
    let rec = girsanov_cross_check(&drift("svc", &[]), &id(1), &f, &settings).unwrap();
    assert!(rec.agrees(3.0), "{rec:?}");
    settings.n_paths = 20_000;
    let rec = girsanov_cross_check(&drift("zero", &[]), &id(1), &f, &settings).unwrap();
    assert!(rec.agrees(3.0), "{rec:?}");
}

#[test]
fn cross_check_ou_against_exact_law() {
    let t = 0.15;
    let f = test_function_get("clamp", &params(&[("a", 1.0)])).unwrap();
    let settings = CrossCheckSettings {
        horizon: t,
        delta: t / 256.0,
        x0: vec![1.0],
        n_paths: 100_000,
        master_seed: 10,
        n_workers: 1,
    };
    let rec = girsanov_cross_check(&drift("linear", &[]), &id(1), &f, &settings).unwrap();
    // X_T ~ N(e^{−T}, (1 − e^{−2T})/2)
    let mu = (-t).exp();
    let sd = ((1.0 - (-2.0 * t).exp()) / 2.0).sqrt();
    let exact = clamp_mean(mu, sd);
    assert!((rec.weighted - exact).abs() <= 3.0 * rec.weighted_se, "{rec:?} vs {exact}");
    assert!((rec.direct - exact).abs() <= 3.0 * rec.direct_se, "{rec:?} vs {exact}");
}

/// `E max(−1, min(1, X))` for `X ~ N(μ, σ²)`.
fn clamp_mean(mu: f64, sd: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).unwrap();
    let (a, b) = ((-1.0 - mu) / sd, (1.0 - mu) / sd);
    let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let middle = mu * (n.cdf(b) - n.cdf(a)) + sd * (phi(a) - phi(b));
    -n.cdf(a) + (1.0 - n.cdf(b)) + middle
}

#[test]
fn exp_moment_envelopes() {
    let cfg = SimConfig::new(1.0, 1.0 / 256.0, vec![0.5], 10_000, 11);
    let r = exp_moment_estimate(&drift("zero", &[]), &id(1), 1.0, &cfg, WeightVariant::Continuous)
        .unwrap();
    assert_eq!(r.estimate, 1.0);
    for (d, m) in [(drift("svc", &[]), 1.0f64), (drift("indicator", &[("a1", -1.0), ("a2", 1.0)]), 1.0)] {
        for lambda in [0.5, 1.0, 2.0] {
            let bound = (lambda * m * m).exp();
            let s = exp_moment_samples(&d, &id(1), lambda, &cfg, WeightVariant::Frozen { delta: 1.0 / 32.0 })
                .unwrap();
            assert!(s.iter().all(|v| *v <= bound && *v >= 1.0));
        }
        let r = exp_moment_estimate(&d, &id(1), 1.0, &cfg, WeightVariant::Continuous).unwrap();
        assert!(r.estimate <= 1f64.exp());
        assert!(!r.heavy_tail);
    }
}
