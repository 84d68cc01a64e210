mod support;

use ehm_core::cocycle::{
    degree, iterate, lyapunov, q_conjugation, rotation_number, transfer, uh_probe, CocycleMap, UhVerdict, Variant,
};
use ehm_core::model::epsilon1;
use ehm_core::numth::torus_norm;
use ehm_core::{CMat2, CouplingTriple, Mat2, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use support::*;

fn lam() -> CouplingTriple {
    CouplingTriple::new(0.1, 2.0, 0.3).unwrap()
}

fn real(m: Mat2) -> CMat2 {
    m.to_complex()
}

fn close(a: CMat2, b: CMat2) -> f64 {
    (a - b).max_abs() / b.max_abs().max(1.0)
}

/// `Ã` rebuilt from the modulus of the directly summed symbol.
fn a_tilde_direct(lam: &CouplingTriple, alpha: f64, e: f64, x: f64) -> Mat2 {
    let m0 = c_direct(lam, alpha, x).norm();
    let m1 = c_direct(lam, alpha, x - alpha).norm();
    let s = 1.0 / (m0 * m1).sqrt();
    Mat2::new((e - 2.0 * (TAU * x).cos()) * s, -m1 * s, m0 * s, 0.0)
}

#[test]
fn amo_quarter_phase_is_a_rotation() {
    let a = transfer(&CouplingTriple::amo(1.0), GOLDEN, 0.0, Variant::A).unwrap();
    let m = a.eval(0.25).unwrap();
    let want = CMat2::new(C64::new(0.0, 0.0), C64::new(-1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    assert!((m - want).max_abs() < 1e-15);
}

#[test]
fn determinants_of_a_and_a_tilde() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = transfer(&lam(), GOLDEN, 0.7, Variant::A).unwrap();
    let at = transfer(&lam(), GOLDEN, 0.7, Variant::ATilde).unwrap();
    for _ in 0..100 {
        let x = rng.gen_range(0.0..1.0);
        let want = c_direct(&lam(), GOLDEN, x - GOLDEN).conj() / c_direct(&lam(), GOLDEN, x);
        assert!((a.eval(x).unwrap().det() - want).norm() < 1e-12);
        let m = at.eval(x).unwrap();
        assert_eq!(m.max_imag(), 0.0);
        assert!((m.det().re - 1.0).abs() < 1e-10);
        assert!(close(m, real(a_tilde_direct(&lam(), GOLDEN, 0.7, x))) < 1e-13);
    }
}

#[test]
fn iterate_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = transfer(&lam(), GOLDEN, 1.1, Variant::A).unwrap();
    for _ in 0..20 {
        let x = rng.gen_range(0.0..1.0);
        let (n, m) = (rng.gen_range(0..30i64), rng.gen_range(0..30i64));
        assert_eq!(iterate(&a, x, 0).unwrap(), CMat2::IDENTITY);
        let lhs = iterate(&a, x, n + m).unwrap();
        let rhs = iterate(&a, x + m as f64 * GOLDEN, n).unwrap() * iterate(&a, x, m).unwrap();
        assert!(close(lhs, rhs) < 1e-8);
        let back = iterate(&a, x, -n).unwrap() * iterate(&a, x - n as f64 * GOLDEN, n).unwrap();
        assert!(close(back, CMat2::IDENTITY) < 1e-8);
    }
}

#[test]
fn lyapunov_of_a_hyperbolic_constant() {
    let mu: f64 = 3.0;
    let c = CocycleMap::constant(GOLDEN, CMat2::diag(C64::new(mu, 0.0), C64::new(1.0 / mu, 0.0)));
    let l = lyapunov(&c, 10_000, 4, 0).unwrap();
    assert!((l.estimate - mu.ln()).abs() < 1e-6);
    assert!(lyapunov(&c, 10, 4, 0).is_err());
}

#[test]
fn lyapunov_agrees_for_a_and_a_tilde() {
    for e in [-3.0, 0.5, 2.0] {
        let a = lyapunov(&transfer(&lam(), GOLDEN, e, Variant::A).unwrap(), 20_000, 4, 1).unwrap();
        let b = lyapunov(&transfer(&lam(), GOLDEN, e, Variant::ATilde).unwrap(), 20_000, 4, 1).unwrap();
        assert!((a.estimate - b.estimate).abs() <= 3.0 * (a.stderr + b.stderr) + 1e-3, "E={e}");
    }
}

#[test]
fn norm_growth_is_controlled_by_the_exponent() {
    let a = transfer(&lam(), GOLDEN, 5.5, Variant::ATilde).unwrap();
    let l = lyapunov(&a, 20_000, 4, 2).unwrap().estimate;
    let implied: Vec<f64> = [100i64, 1000, 10_000]
        .iter()
        .map(|&n| {
            let s = ehm_core::cocycle::iterate_scaled(&a, 0.123, n).unwrap();
            s.ln_norm() - (l + 0.05) * n as f64
        })
        .collect();
    // ln C_δ stays bounded: no upward drift with n
    assert!(implied.iter().all(|v| *v < 5.0), "{implied:?}");
}

#[test]
fn rotation_of_constant_rotation() {
    for t in [0.1, 0.37, 0.8] {
        let c = CocycleMap::constant(GOLDEN, real(Mat2::rotation(t)));
        assert!((rotation_number(&c, 2000, 4).unwrap() - t).abs() < 1e-6);
    }
    let flip = CocycleMap::constant(GOLDEN, CMat2::diag(C64::new(1.0, 0.0), C64::new(-1.0, 0.0)));
    assert!(rotation_number(&flip, 100, 1).is_err());
}

#[test]
fn rotation_shifts_under_degree_two_conjugation() {
    let base = |x: f64| Mat2::rotation(0.21) * Mat2::new(1.0, 0.2 * (TAU * x).sin(), 0.0, 1.0);
    let a2 = CocycleMap::from_fn(GOLDEN, true, move |z| Ok(real(base(z.re))));
    let a1 = CocycleMap::from_fn(GOLDEN, true, move |z| {
        let x = z.re;
        Ok(real(Mat2::rotation(x + GOLDEN).inv() * base(x) * Mat2::rotation(x)))
    });
    let r2 = rotation_number(&a2, 20_000, 8).unwrap();
    let r1 = rotation_number(&a1, 20_000, 8).unwrap();
    assert!(torus_norm(r1 - (r2 - GOLDEN)) < 1e-4, "{r1} {r2}");
}

#[test]
fn rotation_below_the_spectrum_is_one_half() {
    let at = transfer(&lam(), GOLDEN, -20.0, Variant::ATilde).unwrap();
    let rho = rotation_number(&at, 5000, 4).unwrap();
    assert!(torus_norm(rho - 0.5) < 1e-3, "{rho}");
}

#[test]
fn rotation_is_close_to_the_unperturbed_angle() {
    let theta = 0.31;
    let mut constants = Vec::new();
    for delta in [1e-1, 1e-2, 1e-3] {
        let p = move |x: f64| Mat2::rotation(theta) * Mat2::new(1.0 + delta * (TAU * x).cos(), delta, 0.0, 1.0 / (1.0 + delta * (TAU * x).cos()));
        let dist = (0..256)
            .map(|m| (p(m as f64 / 256.0) - Mat2::rotation(theta)).max_abs())
            .fold(0.0, f64::max);
        let c = CocycleMap::from_fn(GOLDEN, true, move |z| Ok(real(p(z.re))));
        let rho = rotation_number(&c, 20_000, 8).unwrap();
        constants.push(torus_norm(rho - theta) / dist);
    }
    assert!(constants.iter().all(|c| *c < 1.0), "{constants:?}");
}

#[test]
fn degree_examples() {
    assert_eq!(degree(|x| Mat2::rotation(2.0 * x), 256).unwrap(), 4);
    assert_eq!(degree(|_| Mat2::new(2.0, 1.0, 0.5, 3.0), 16).unwrap(), 0);
    assert!(degree(|x| Mat2::rotation(40.0 * x), 16).is_err());
}

#[test]
fn uh_probe_verdicts() {
    let (_, hi) = lam().gershgorin();
    let outside = transfer(&lam(), GOLDEN, hi + 1.0, Variant::ATilde).unwrap();
    assert_eq!(uh_probe(&outside, 200, 32, 0.01, 0.02).unwrap().verdict, UhVerdict::UhLikely);
    let rot = CocycleMap::constant(GOLDEN, real(Mat2::rotation(0.2)));
    assert_eq!(uh_probe(&rot, 200, 16, 0.01, 0.02).unwrap().verdict, UhVerdict::NotUh);
    // period-two AMO: trace of A₂ at θ = 1/4 is E² − 2 = −1
    let band = transfer(&CouplingTriple::amo(1.0), 0.5, 1.0, Variant::A).unwrap();
    assert_eq!(uh_probe(&band, 1000, 64, 0.01, 0.02).unwrap().verdict, UhVerdict::NotUh);
}

#[test]
fn uh_energies_have_labelled_rotation_at_rational_frequency() {
    let (p, q) = (3.0, 8.0);
    let alpha = p / q;
    let amo = CouplingTriple::amo(2.0);
    let mut found = 0;
    for j in 0..80 {
        let e = -6.0 + 12.0 * j as f64 / 79.0;
        let at = transfer(&amo, alpha, e, Variant::ATilde).unwrap();
        if uh_probe(&at, 400, 32, 0.01, 0.02).unwrap().verdict != UhVerdict::UhLikely {
            continue;
        }
        found += 1;
        let rho = rotation_number(&at, 8000, 4).unwrap();
        let best = (-8..=8).map(|k| torus_norm(2.0 * rho - k as f64 * alpha)).fold(f64::INFINITY, f64::min);
        assert!(best < 1e-3, "E={e} rho={rho}");
    }
    assert!(found > 10);
}

#[test]
fn q_conjugation_residuals() {
    let q = q_conjugation(&lam(), GOLDEN, 256).unwrap();
    assert!(q.cohomology_residual(2048).unwrap() <= 1e-10);
    // Q(x+α)A(x)Q⁻¹(x) against an independently built Ã
    let a = transfer(&lam(), GOLDEN, 0.9, Variant::A).unwrap();
    let mut worst = 0.0f64;
    for m in 0..2048 {
        let x = m as f64 / 2048.0;
        let lhs = q.eval(C64::new(x + GOLDEN, 0.0)).unwrap() * a.eval(x).unwrap() * q.eval(C64::new(x, 0.0)).unwrap().inv();
        worst = worst.max((lhs - real(a_tilde_direct(&lam(), GOLDEN, 0.9, x))).max_abs());
    }
    assert!(worst <= 1e-8, "{worst}");
    let amo = q_conjugation(&CouplingTriple::amo(2.0), GOLDEN, 64).unwrap();
    assert!(amo.f().coeffs.iter().all(|c| c.norm() < 1e-14));
}

#[test]
fn a_tilde_strip_is_bounded_by_epsilon1() {
    let at = transfer(&lam(), GOLDEN, 0.0, Variant::ATilde).unwrap();
    let h = epsilon1(&lam()).unwrap() / TAU;
    assert!((at.strip_radius() - h).abs() < 1e-15);
    assert!(transfer(&lam(), GOLDEN, 0.0, Variant::ATilde).unwrap().complexified(1.1 * h).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn degree_is_additive(k1 in -6i64..6, k2 in -6i64..6, wobble in 0.0f64..0.15) {
        let m = move |x: f64| Mat2::rotation(k1 as f64 * x / 2.0 + wobble * (TAU * x).sin());
        let n = move |x: f64| Mat2::rotation(k2 as f64 * x / 2.0 + wobble * (2.0 * TAU * x).cos());
        prop_assume!((k1 % 2 == 0) && (k2 % 2 == 0));
        let dm = degree(m, 512).unwrap();
        let dn = degree(n, 512).unwrap();
        prop_assert_eq!(dm, k1);
        prop_assert_eq!(degree(move |x| m(x) * n(x), 512).unwrap(), dm + dn);
    }

    #[test]
    fn a_tilde_is_real_unimodular(x in 0.0f64..1.0, e in -6.0f64..6.0) {
        let m = transfer(&lam(), GOLDEN, e, Variant::ATilde).unwrap().eval(x).unwrap();
        prop_assert_eq!(m.max_imag(), 0.0);
        prop_assert!((m.det().re - 1.0).abs() < 1e-10);
    }
}
