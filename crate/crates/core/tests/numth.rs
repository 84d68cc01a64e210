#![allow(clippy::needless_range_loop)]

mod support;

use ehm_core::numth::{beta_estimate, cf_expand, resonances, torus_norm};
use ehm_core::{Error, Irrational};
use proptest::prelude::*;
use support::GOLDEN;

fn brute_min_dist(a: &Irrational, x: f64, bound: i64) -> f64 {
    (-bound..=bound).map(|l| a.dist(x, l)).fold(f64::INFINITY, f64::min)
}

#[test]
fn golden_expansion_is_fibonacci() {
    let a = cf_expand(GOLDEN, 30).unwrap();
    assert!(a.depth() > 20);
    assert!(a.partial_quotients().iter().all(|&q| q == 1));
    let q: Vec<u64> = (0..8).map(|n| a.q_u64(n).unwrap()).collect();
    assert_eq!(q, [1, 1, 2, 3, 5, 8, 13, 21]);
}

#[test]
fn silver_expansion_is_all_twos() {
    let a = cf_expand(2f64.sqrt() - 1.0, 15).unwrap();
    assert!(a.partial_quotients().iter().all(|&q| q == 2));
    assert_eq!(Irrational::silver().partial_quotients()[..10], [2; 10]);
}

#[test]
fn one_third_is_rational() {
    assert!(matches!(cf_expand(1.0 / 3.0, 30), Err(Error::RationalInput { .. })));
    assert!(matches!(Irrational::parse("0.25", 30), Err(Error::RationalInput { .. })));
}

#[test]
fn torus_norm_examples() {
    assert!((torus_norm(0.7) - 0.3).abs() < 1e-15);
    assert!((torus_norm(-0.2) - 0.2).abs() < 1e-15);
    assert_eq!(torus_norm(0.5), 0.5);
}

#[test]
fn named_frequencies_parse() {
    let g = Irrational::parse("golden", 40).unwrap();
    assert!((g.value() - GOLDEN).abs() < 2e-16);
    let d = Irrational::parse("0.6180339887498948482045868343656", 40).unwrap();
    assert!(d.partial_quotients()[..30].iter().all(|&q| q == 1));
}

#[test]
fn convergent_recurrences_and_bounds() {
    for a in [Irrational::golden(), Irrational::silver()] {
        let pq = a.partial_quotients();
        for n in 1..a.depth().min(60) {
            let an = num_bigint::BigUint::from(pq[n]);
            assert_eq!(*a.q(n + 1), &an * a.q(n) + a.q(n - 1));
            assert_eq!(*a.p(n + 1), &an * a.p(n) + a.p(n - 1));
        }
        // 1/(2q_{n+1}) ≤ ‖q_nα‖ ≤ 1/q_{n+1}
        for n in 1..a.depth() {
            let (Some(q), Some(q1)) = (a.q_u64(n), a.q_u64(n + 1)) else { break };
            if q1 > 1 << 40 {
                break;
            }
            let d = a.dist(0.0, q as i64);
            assert!(d <= 1.0 / q1 as f64 * (1.0 + 1e-9), "upper n={n}");
            assert!(d >= 0.5 / q1 as f64 * (1.0 - 1e-9), "lower n={n}");
        }
    }
}

#[test]
fn best_approximation_property() {
    let a = Irrational::golden();
    for n in 1..a.depth() {
        let (q, q1) = (a.q_u64(n).unwrap() as i64, a.q_u64(n + 1).unwrap() as i64);
        if q1 > 10_000 {
            break;
        }
        let best = (1..q1).map(|k| a.dist(0.0, k)).fold(f64::INFINITY, f64::min);
        assert!((a.dist(0.0, q) - best).abs() < 1e-15, "n={n}");
    }
}

#[test]
fn beta_for_bounded_quotients() {
    let g = Irrational::golden();
    let fib: Vec<f64> = g.denominators_f64();
    let expect = (5..g.depth()).map(|n| fib[n + 1].ln() / fib[n]).fold(0.0, f64::max);
    let b = beta_estimate(&g, 5).unwrap();
    assert!((b - expect).abs() < 1e-12);
    let s = Irrational::silver();
    let ratios: Vec<f64> = {
        let q = s.denominators_f64();
        (1..20).map(|n| q[n + 1].ln() / q[n]).collect()
    };
    assert!(ratios.windows(2).all(|w| w[1] < w[0]));
    assert!(*ratios.last().unwrap() < 0.1);
    assert!(beta_estimate(&s, 10).unwrap() < beta_estimate(&s, 3).unwrap());
    assert!(matches!(Irrational::from_partial_quotients(&[1, 2]), Err(Error::InsufficientDepth { .. })));
}

#[test]
fn exact_resonance_at_a_denominator() {
    let a = Irrational::golden();
    let q5 = a.q_u64(5).unwrap() as i64;
    let theta = a.frac_mul(q5) / 2.0;
    let res = resonances(theta, &a, 0.2, 100).unwrap();
    let hit = res.entries.iter().find(|r| r.n == q5).expect("q5 is a resonance");
    assert!(hit.dist < 1e-15);
}

#[test]
fn resonances_are_minimal_and_ordered() {
    let a = Irrational::golden();
    let res = resonances(0.237, &a, 0.2, 100).unwrap();
    assert_eq!(res.entries[0].n, 0);
    for w in res.entries.windows(2) {
        assert!(w[1].n.abs() > w[0].n.abs());
    }
    for r in &res.entries {
        assert!(r.dist <= (-0.2 * r.n.abs() as f64).exp());
        assert!((r.dist - brute_min_dist(&a, 0.474, r.n.abs())).abs() < 1e-15);
    }
    // nothing is missed
    for k in 1..=100i64 {
        for s in [k, -k] {
            let d = a.dist(0.474, s);
            if d <= (-0.2 * k as f64).exp() && (d - brute_min_dist(&a, 0.474, k)).abs() < 1e-15 {
                assert!(res.entries.iter().any(|r| r.n.abs() == k), "missed {s}");
            }
        }
    }
}

proptest! {
    #[test]
    fn torus_norm_is_distance_to_integers(x in -50.0f64..50.0) {
        let t = torus_norm(x);
        prop_assert!((0.0..=0.5).contains(&t));
        prop_assert!((t - (x - x.round()).abs()).abs() < 1e-12);
        prop_assert!((torus_norm(x + 3.0) - t).abs() < 1e-12);
    }

    #[test]
    fn convergents_bracket_alpha(alpha in 0.01f64..0.99) {
        if let Ok(a) = cf_expand(alpha, 25) {
            for n in 0..a.depth().min(20) {
                let (q, q1) = (a.denominators_f64()[n], a.denominators_f64()[n + 1]);
                prop_assert!(q1 > q || n == 0);
                if q * q1 > 1e12 {
                    break;
                }
                let p = ehm_core::numth::big_to_f64(a.p(n));
                prop_assert!((alpha - p / q).abs() <= 1.0 / (q * q1) * (1.0 + 1e-6));
            }
        }
    }

    #[test]
    fn resonance_entries_pass_brute_force(theta in 0.0f64..1.0, eps0 in 0.05f64..0.5) {
        let a = Irrational::golden();
        let res = resonances(theta, &a, eps0, 60).unwrap();
        for r in &res.entries {
            prop_assert!((r.dist - brute_min_dist(&a, 2.0 * theta, r.n.abs())).abs() < 1e-14);
            prop_assert!(r.dist <= (-eps0 * r.n.abs() as f64).exp());
        }
    }
}
