use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weak_em::drift::{
    holder_eval, svc_eval, svc_locate, svc_removed_intervals, Dyadic, HolderDrift, LacunaryHolder,
    SvcLocation, CATALOG,
};
use weak_em::{catalog_get, Error, Params};

fn params(kv: &[(&str, f64)]) -> Params {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Removed intervals through `depth` as `(left, right, n, j)` in `f64`, built
/// from the construction rule with rational lengths.
fn linear_scan_intervals(depth: u32) -> Vec<(f64, f64, u32, u64)> {
    // all endpoints through level 14 are multiples of 2^-29, exact in f64
    let mut retained = vec![(0.0f64, 1.0f64)];
    let mut out = Vec::new();
    for n in 1..=depth {
        let gap = 4f64.powi(-(n as i32));
        let mut next = Vec::new();
        for (j, &(a, b)) in retained.iter().enumerate() {
            let side = (b - a - gap) / 2.0;
            out.push((a + side, a + side + gap, n, j as u64 + 1));
            next.push((a, a + side));
            next.push((a + side + gap, b));
        }
        retained = next;
    }
    out
}

fn scan_value(intervals: &[(f64, f64, u32, u64)], x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    for &(l, r, n, j) in intervals {
        if l < x && x < r {
            return 1.0 - 0.5f64.powi((n as u64 + j) as i32);
        }
    }
    1.0
}

#[test]
fn svc_matches_linear_scan() {
    let depth = 12;
    let intervals = linear_scan_intervals(depth);
    assert_eq!(intervals.len(), (1 << depth) - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10_000 {
        let x: f64 = rng.random();
        assert_eq!(svc_eval(x, depth).unwrap(), scan_value(&intervals, x), "x = {x}");
    }
    for &(l, r, _, _) in intervals.iter().take(500) {
        assert_eq!(svc_eval(l, depth).unwrap(), 1.0);
        assert_eq!(svc_eval(r, depth).unwrap(), 1.0);
    }
}

#[test]
fn svc_examples() {
    assert_eq!(svc_locate(0.5, 1).unwrap(), SvcLocation::Removed { level: 1, index: 1 });
    assert_eq!(svc_locate(0.1875, 2).unwrap(), SvcLocation::Removed { level: 2, index: 1 });
    assert_eq!(svc_locate(-0.1, 5).unwrap(), SvcLocation::Outside);
    assert_eq!(svc_eval(0.5, 1).unwrap(), 0.75);
    assert_eq!(svc_eval(0.5, 25).unwrap(), 0.75);
    assert_eq!(svc_eval(0.1875, 2).unwrap(), 0.875);
    assert_eq!(svc_eval(0.0, 25).unwrap(), 1.0);
    assert_eq!(svc_eval(1.0, 25).unwrap(), 1.0);
    assert!(matches!(svc_eval(0.5, 31), Err(Error::DepthLimit { .. })));
    assert!(svc_removed_intervals(31).is_err());
}

#[test]
fn svc_interval_lengths_and_disjointness() {
    let mut all = Vec::new();
    for n in 1..=12 {
        let ivs = svc_removed_intervals(n).unwrap();
        assert_eq!(ivs.len(), 1 << (n - 1));
        for iv in &ivs {
            assert_eq!(iv.right.checked_sub(iv.left).unwrap(), Dyadic::new(1, 2 * n));
            all.push((iv.left, iv.right));
        }
    }
    all.sort();
    for w in all.windows(2) {
        assert!(w[0].1 < w[1].0, "{} {} overlap {} {}", w[0].0, w[0].1, w[1].0, w[1].1);
    }
}

#[test]
fn svc_measure_of_value_one() {
    let depth = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let n = 1_000_000;
    let mut ones = 0usize;
    for _ in 0..n {
        let v = svc_eval(rng.random::<f64>(), depth).unwrap();
        assert!((0.0..=1.0).contains(&v));
        ones += (v == 1.0) as usize;
    }
    // value 1 exactly on A_N plus intervals whose weight 2^-(n+j) underflows below 2^-53
    let p_min = 0.5 - 2f64.powi(1 - depth as i32);
    let se = (p_min * (1.0 - p_min) / n as f64).sqrt();
    assert!(ones as f64 / n as f64 >= p_min - 3.0 * se);
}

proptest! {
    #[test]
    fn svc_depth_stability(x in -0.1f64..1.1, depth in 1u32..=25) {
        let a = svc_eval(x, depth).unwrap();
        let b = svc_eval(x, depth + 5).unwrap();
        prop_assert!((a - b).abs() <= 2f64.powi(-(depth as i32) - 1));
    }

    #[test]
    fn svc_values_in_admissible_set(x in -0.5f64..1.5) {
        let v = svc_eval(x, 20).unwrap();
        let ok = match svc_locate(x, 20).unwrap() {
            SvcLocation::Outside => v == 0.0,
            SvcLocation::InSet { .. } => v == 1.0,
            SvcLocation::Removed { level, index } => {
                v == 1.0 - 2f64.powi(-((level as u64 + index) as i32))
            }
        };
        prop_assert!(ok);
    }

    #[test]
    fn catalog_growth_bound(name_idx in 0usize..6, x in -50.0f64..50.0) {
        let name = CATALOG[name_idx];
        let d = catalog_get(name, &Params::new()).unwrap();
        let mut out = [0.0];
        d.eval(&[x], &mut out);
        prop_assert!(out[0].abs() <= d.l1 + d.l2 * x.abs() + 1e-12, "{} at {}", name, x);
    }
}

#[test]
fn holder_inequality_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100_000 {
        let beta = rng.random_range(0.05..1.0);
        let h = HolderDrift {
            beta,
            scale: rng.random_range(0.1..3.0),
            center: rng.random_range(-1.0..1.0),
        };
        let x: f64 = rng.random_range(-5.0..5.0);
        let y: f64 = rng.random_range(-5.0..5.0);
        let lhs = (holder_eval(&h, x) - holder_eval(&h, y)).abs();
        let rhs = h.seminorm() * (x - y).abs().powf(beta);
        assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-300, "beta {beta} x {x} y {y}");
        // same side of the center: constant L
        if (x - h.center) * (y - h.center) >= 0.0 {
            assert!(lhs <= h.scale * (x - y).abs().powf(beta) * (1.0 + 1e-12));
        }
    }
    // the cross-center seminorm is attained
    let h = HolderDrift { beta: 0.5, scale: 1.0, center: 0.0 };
    let ratio = (holder_eval(&h, 1.0) - holder_eval(&h, -1.0)) / 2f64.sqrt();
    assert!((ratio - h.seminorm()).abs() < 1e-15);
}

#[test]
fn holder_examples() {
    let h = HolderDrift { beta: 0.5, scale: 1.0, center: 0.0 };
    assert_eq!(holder_eval(&h, 4.0), 2.0);
    assert_eq!(holder_eval(&h, 0.0), 0.0);
    assert!((holder_eval(&h, 1.0) - holder_eval(&h, 0.0)).abs() <= 1.0);
}

#[test]
fn lacunary_holder_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for beta in [0.3, 0.5, 0.8] {
        let w = LacunaryHolder { beta, scale: 1.0, center: 0.0, terms: 20 };
        for _ in 0..20_000 {
            let x: f64 = rng.random_range(-4.0..4.0);
            let h = 10f64.powf(rng.random_range(-6.0..0.5));
            let lhs = (w.eval(x + h) - w.eval(x)).abs();
            assert!(lhs <= h.powf(beta) * (1.0 + 1e-9), "beta {beta} h {h}");
        }
        assert!(w.eval(1.234).abs() <= w.sup_bound());
    }
}

#[test]
fn catalog_metadata() {
    let z = catalog_get("zero", &Params::new()).unwrap();
    assert_eq!((z.l1, z.l2), (0.0, 0.0));
    assert!(z.is_zero());
    let l = catalog_get("linear", &params(&[("a", -2.0), ("lambda", 3.0)])).unwrap();
    assert_eq!((l.l1, l.l2), (2.0, 3.0));
    let s = catalog_get("svc", &params(&[("depth", 20.0)])).unwrap();
    assert_eq!(s.theoretical_alpha, Some(0.25));
    assert_eq!(s.theoretical_p0, Some(2.0));
    assert_eq!((s.l1, s.l2), (1.0, 0.0));
    assert!(s.bounded);
    let h = catalog_get("holder", &params(&[("beta", 0.6)])).unwrap();
    assert_eq!(h.theoretical_alpha, Some(0.3));
    assert!(h.sublinear);
    let two = catalog_get("svc", &params(&[("dim", 2.0)])).unwrap();
    let mut out = [0.0; 2];
    two.eval(&[0.5, 3.0], &mut out);
    assert_eq!(out, [0.75, 0.0]);
}

#[test]
fn catalog_errors() {
    assert!(matches!(catalog_get("cubic", &Params::new()), Err(Error::Catalog(_))));
    assert!(matches!(
        catalog_get("svc", &params(&[("beta", 0.5)])),
        Err(Error::Catalog(_))
    ));
    assert!(catalog_get("svc", &params(&[("depth", 31.0)])).is_err());
    assert!(catalog_get("holder", &params(&[("beta", 1.5)])).is_err());
    assert!(catalog_get("indicator", &params(&[("a1", 1.0), ("a2", 0.0)])).is_err());
}
