mod support;

use ehm_core::model::FiniteSection;
use ehm_core::spectral::{
    detect_gaps, duality_check, gap_label, ids_counting, ids_rotation, linspace, spectrum_rational, IDSCurve, IdsMethod,
};
use ehm_core::{CouplingTriple, Irrational};
use proptest::prelude::*;
use std::f64::consts::TAU;
use support::*;

fn curve(energies: Vec<f64>, values: Vec<f64>) -> IDSCurve {
    IDSCurve { energies, values, method: IdsMethod::SturmCount, resolution: 0, theta_samples: 1 }
}

#[test]
fn one_periodic_band_is_the_envelope() {
    let lam = CouplingTriple::new(0.1, 2.0, 0.3).unwrap();
    let thetas = linspace(0.0, 1.0, 41);
    let s = spectrum_rational(&lam, 0, 1, &thetas, 1e-12).unwrap();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &t in &thetas {
        let v = 2.0 * (TAU * t).cos();
        let c = c_direct(&lam, 0.0, t).norm();
        lo = lo.min(v - 2.0 * c);
        hi = hi.max(v + 2.0 * c);
    }
    assert_eq!(s.intervals.len(), 1);
    assert!((s.intervals[0].0 - lo).abs() < 1e-9 && (s.intervals[0].1 - hi).abs() < 1e-9);
}

#[test]
fn amo_at_one_half_has_two_symmetric_bands() {
    let amo = CouplingTriple::amo(2.0);
    let thetas = linspace(0.0, 0.5, 26);
    let s = spectrum_rational(&amo, 1, 2, &thetas, 1e-10).unwrap();
    assert_eq!(s.intervals.len(), 2);
    let ((a, b), (c, d)) = (s.intervals[0], s.intervals[1]);
    assert!((a + d).abs() < 1e-8 && (b + c).abs() < 1e-8);
    assert!(s.bands_per_theta.iter().all(|&n| n <= 2));
    // every eigenvalue of a long periodic section lies in the bands, and they reach the edges
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &t in &thetas {
        let h = dense_section(&amo, 0.5, t, 0, 60);
        for e in hermitian_eigenvalues(&h) {
            assert!(s.distance(e) < 0.02, "{e}");
            lo = lo.min(e);
            hi = hi.max(e);
        }
    }
    assert!((lo - a).abs() < 0.02 && (hi - d).abs() < 0.02);
}

#[test]
fn band_count_is_at_most_q() {
    let lam = CouplingTriple::new(0.1, 2.0, 0.3).unwrap();
    for (p, q) in [(1u64, 3u64), (2, 5), (5, 8), (8, 13)] {
        let s = spectrum_rational(&lam, p, q, &linspace(0.0, 1.0, 9), 1e-9).unwrap();
        assert!(s.bands_per_theta.iter().all(|&n| n as u64 <= q));
        let (lo, hi) = lam.gershgorin();
        assert!(s.intervals.iter().all(|&(a, b)| a >= lo && b <= hi));
    }
}

#[test]
fn band_edges_match_finite_sections() {
    let amo = CouplingTriple::amo(2.0);
    for (p, q) in [(1u64, 3u64), (3, 8), (8, 13)] {
        let alpha = p as f64 / q as f64;
        let theta = 0.1;
        let s = spectrum_rational(&amo, p, q, &[theta], 1e-10).unwrap();
        let h = FiniteSection::new(&amo, alpha, theta, 0, 40 * q as usize).unwrap();
        let ev = h.eigenvalues().unwrap();
        let step = 0.05;
        assert!((ev[0] - s.intervals[0].0).abs() < 2.0 * step);
        assert!((ev[ev.len() - 1] - s.intervals.last().unwrap().1).abs() < 2.0 * step);
    }
}

#[test]
fn ids_endpoints_and_rotation_agreement() {
    let amo = CouplingTriple::amo(2.0);
    let (lo, hi) = amo.gershgorin();
    let grid = [lo - 0.5, -1.0, 0.3, 2.5, hi + 0.5];
    let n = ids_counting(&amo, GOLDEN, &grid, 400, 4, 0).unwrap();
    assert_eq!(n.values[0], 0.0);
    assert_eq!(n.values[4], 1.0);
    assert!(n.values.windows(2).all(|w| w[0] <= w[1]));
    let r = ids_rotation(&amo, GOLDEN, &grid[1..4], 20_000, 4).unwrap();
    for (a, b) in n.values[1..4].iter().zip(&r.values) {
        assert!((a - b).abs() < 0.02, "{a} {b}");
    }
}

#[test]
fn flat_free_curve_has_no_gaps() {
    let e = linspace(-2.0, 2.0, 401);
    let v: Vec<f64> = e.iter().map(|x| (x / 2.0).acos().mul_add(-1.0 / std::f64::consts::PI, 1.0)).collect();
    assert!(detect_gaps(&curve(e, v), 1e-3, 0.01).entries.is_empty());
}

#[test]
fn synthetic_staircase_has_one_plateau() {
    let e = linspace(0.0, 1.0, 1001);
    let v: Vec<f64> = e
        .iter()
        .map(|&x| if x < 0.4 { x } else if x <= 0.7 { 0.4 } else { x - 0.3 })
        .collect();
    let t = detect_gaps(&curve(e, v), 1e-6, 0.05);
    assert_eq!(t.entries.len(), 1);
    let g = &t.entries[0];
    assert!((g.width - 0.3).abs() <= 0.0011);
    assert!((g.n_value - 0.4).abs() < 1e-12);
}

#[test]
fn gap_label_examples() {
    let g = Irrational::golden();
    let (k, m, r) = gap_label(g.value(), &g, 5);
    assert_eq!((k, m), (1, 0));
    assert!(r < 1e-15);
    assert_eq!(gap_label(1.0, &g, 5), (0, 1, 0.0));
    let brute = (-5i64..=5)
        .map(|k| {
            let x = 0.5 - k as f64 * g.value();
            (x - x.round()).abs()
        })
        .fold(f64::INFINITY, f64::min);
    let (_, _, r) = gap_label(0.5, &g, 5);
    assert!((r - brute).abs() < 1e-15 && r > 0.01);
}

#[test]
fn duality_check_rejects_region_one() {
    let lam = CouplingTriple::new(0.15, 0.5, 0.05).unwrap();
    assert!(duality_check(&lam, GOLDEN, 200, 2).is_err());
}

#[test]
fn amo_duality_at_moderate_size() {
    let r = duality_check(&CouplingTriple::amo(2.0), GOLDEN, 600, 4).unwrap();
    assert!(r.hausdorff <= 0.05, "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ids_is_monotone_in_energy(seed in 0u64..50, a in -6.0f64..6.0, b in -6.0f64..6.0) {
        let lam = CouplingTriple::new(0.1, 2.0, 0.3).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let n = ids_counting(&lam, GOLDEN, &[lo, hi], 100, 2, seed).unwrap();
        prop_assert!(n.values[0] <= n.values[1]);
        prop_assert!((0.0..=1.0).contains(&n.values[0]) && (0.0..=1.0).contains(&n.values[1]));
    }

    #[test]
    fn gap_label_residual_is_never_hidden(n in 0.0f64..1.0) {
        let g = Irrational::golden();
        let (k, m, r) = gap_label(n, &g, 10);
        prop_assert!(k.abs() <= 10);
        prop_assert!((n - k as f64 * g.value() - m as f64).abs() - r < 1e-15);
    }
}
