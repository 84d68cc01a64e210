mod support;

use ehm_core::cocycle::q_conjugation;
use ehm_core::fourier::TrigPoly;
use ehm_core::localize::centered_dual_eigenpair;
use ehm_core::reduce::{
    almost_reduce, build_u, build_w, complete_to_sl2, gap_opening_certificate, matrix_cohomology, parabolic_reduce,
    reduce_invariant_section, scalar_cohomology, theta_rho_consistency, ArConfig, ConsistencyConfig,
    ParabolicConfig, TrigMatrix,
};
use ehm_core::{CouplingTriple, Error, Irrational, Mat2, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use support::GOLDEN;

fn random_analytic(rng: &mut ChaCha8Rng, k: i64, decay: f64) -> TrigPoly {
    let coeffs = (-k..=k)
        .map(|j| {
            let w = (-decay * j.abs() as f64).exp();
            C64::new(rng.gen_range(-1.0..1.0) * w, rng.gen_range(-1.0..1.0) * w)
        })
        .collect();
    TrigPoly::new(-k, coeffs)
}

#[test]
fn delta_function_gives_a_four_mode_field() {
    let lam = CouplingTriple::new(0.1, 2.0, 0.3).unwrap();
    let f = build_u(&lam, GOLDEN, 0.2, 0.4, &[C64::new(1.0, 0.0)], 0, 0).unwrap();
    assert_eq!(f.window, (0, 0));
    let support = |p: &TrigPoly| (p.lo, p.hi());
    assert_eq!(support(&f.u.comps[0]), (0, 0));
    assert_eq!(support(&f.u.comps[1]), (0, 0));
    // the defect of a delta sits on the two neighbouring sites
    let d = &f.defect.comps[0];
    assert!(d.coeff(-1).norm() > 0.0 && d.coeff(1).norm() > 0.0);
    assert!(build_u(&lam, GOLDEN, 0.2, 0.4, &[], 0, 0).is_err());
}

#[test]
fn conjugacy_is_real_and_unimodular() {
    let amo = CouplingTriple::amo(2.0);
    let p = centered_dual_eigenpair(&amo, GOLDEN, 0.3, 401).unwrap();
    let q = q_conjugation(&amo, GOLDEN, 128).unwrap();
    let field = build_u(&amo, GOLDEN, 0.3, p.energy, &p.u, p.start, 16).unwrap();
    let w = build_w(&field, &amo, GOLDEN, 0, &q, 1024).unwrap();
    assert!(w.det_error <= 1e-8, "{}", w.det_error);
    assert!(w.det_min > 0.0);
    assert!(w.w2.iter().all(|m| (m.det() - 1.0).abs() <= 1e-8));
    assert_eq!(w.w2.len(), 1025);
}

#[test]
fn almost_reduction_trend_on_amo() {
    let amo = CouplingTriple::amo(2.0);
    let cfg = ArConfig { theta: Some(0.3), ..ArConfig::default() };
    let p = centered_dual_eigenpair(&amo, GOLDEN, 0.3, cfg.section_size).unwrap();
    let r = almost_reduce(&amo, &Irrational::golden(), p.energy, 2, &[4, 8, 16, 32], &cfg).unwrap();
    assert!(r.eigen_residual < 1e-12);
    assert!(r.trend_ok, "{:?}", r.results.iter().map(|c| c.defect).collect::<Vec<_>>());
    let last = r.results.last().unwrap();
    assert!(last.defect <= 1e-3);
    for c in &r.results {
        assert!(c.measured_degree.unsigned_abs() <= 36 * r.n as u64);
        assert!(c.w_norm.is_finite() && c.w_norm >= 1.0);
    }
    assert_eq!(r.n, r.n_j.unsigned_abs() as i64 + 1);
}

#[test]
fn almost_reduction_rejects_region_one() {
    let lam = CouplingTriple::new(0.15, 0.5, 0.05).unwrap();
    assert!(matches!(
        almost_reduce(&lam, &Irrational::golden(), 0.0, 0, &[4], &ArConfig::default()),
        Err(Error::WrongRegion { .. })
    ));
}

#[test]
fn completion_of_unit_vectors_is_the_identity() {
    let v = vec![[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]; 8];
    let c = complete_to_sl2(&v).unwrap();
    assert!(c.det_error < 1e-15);
    for m in &c.m {
        assert!((m.a - 1.0).norm() < 1e-15 && m.b.norm() < 1e-15 && m.c.norm() < 1e-15 && (m.d - 1.0).norm() < 1e-15);
    }
}

#[test]
fn completion_is_unimodular_and_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let v: Vec<[C64; 2]> = (0..64)
            .map(|_| {
                [
                    C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
                    C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
                ]
            })
            .collect();
        let c = complete_to_sl2(&v).unwrap();
        assert!(c.det_error <= 1e-12);
        assert!(c.norm_max <= 2.0 * c.norm_bound + 1e-12);
        for (m, w) in c.m.iter().zip(&v) {
            assert_eq!((m.a, m.c), (w[0], w[1]));
        }
    }
}

#[test]
fn scalar_cohomology_of_a_cosine() {
    let tau = TrigPoly::new(-1, vec![C64::new(0.5, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0)]);
    let sol = scalar_cohomology(&tau, GOLDEN, 10).unwrap();
    // ψ(x) − ψ(x+α) = −cos 2πx  ⇒  ψ(x) = Re(e^{2πix}/(e^{2πiα} − 1))
    let z = C64::from_polar(1.0, TAU * GOLDEN) - 1.0;
    for m in 0..64 {
        let x = m as f64 / 64.0;
        let want = (C64::from_polar(1.0, TAU * x) / z).re;
        assert!((sol.solution.eval_real(x) - want).norm() < 1e-12);
    }
    assert!(sol.residual <= 1e-12);
    assert!(scalar_cohomology(&tau, GOLDEN, 0).is_err());
}

#[test]
fn scalar_cohomology_of_analytic_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let tau = random_analytic(&mut rng, 150, 0.3);
        let sol = scalar_cohomology(&tau, GOLDEN, 200).unwrap();
        assert!(sol.residual <= 1e-8, "{}", sol.residual);
        assert_eq!(sol.solution.coeff(0), C64::new(0.0, 0.0));
    }
}

#[test]
fn matrix_cohomology_of_constants_vanishes() {
    let one = |v: f64| TrigPoly::new(0, vec![C64::new(v, 0.0)]);
    let m1 = TrigMatrix::new(one(0.3), one(-1.0), one(2.0), one(0.5));
    let sol = matrix_cohomology(0.5, &m1, GOLDEN, 20).unwrap();
    for e in &sol.solution.entries {
        assert!(e.coeffs.iter().all(|c| c.norm() < 1e-15));
    }
    assert!(sol.residual < 1e-14);
}

#[test]
fn matrix_cohomology_of_analytic_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..3 {
        let m1 = TrigMatrix::new(
            random_analytic(&mut rng, 150, 0.3),
            random_analytic(&mut rng, 150, 0.3),
            random_analytic(&mut rng, 150, 0.3),
            random_analytic(&mut rng, 150, 0.3),
        );
        let sol = matrix_cohomology(0.5, &m1, GOLDEN, 200).unwrap();
        assert!(sol.residual <= 1e-8, "{}", sol.residual);
    }
}

fn conj_map(x: f64) -> Mat2 {
    let (s, c) = ((TAU * x).sin(), (TAU * x).cos());
    Mat2::new(1.0, 0.2 * s, 0.0, 1.0) * Mat2::new(1.0, 0.0, 0.15 * c - 0.05 * s, 1.0)
}

#[test]
fn synthetic_parabolic_cocycle_is_recovered() {
    let a = -0.42;
    let m0 = Mat2::new(-1.0, a, 0.0, -1.0);
    let h = conj_map;
    let pf = reduce_invariant_section(
        GOLDEN,
        move |x| Ok(h(x + GOLDEN) * m0 * h(x).inv()),
        move |x| Ok(h(x + GOLDEN) * Mat2::new(0.0, 0.0, 1.0, 0.0) * h(x).inv()),
        move |x| {
            let p = h(x);
            Ok([C64::new(p.a, 0.0) * C64::from_polar(1.0, 0.3), C64::new(p.c, 0.0) * C64::from_polar(1.0, 0.3)])
        },
        &ParabolicConfig::default(),
    )
    .unwrap();
    assert_eq!(pf.d, -1.0);
    assert!((pf.a - a).abs() < 1e-6, "{}", pf.a);
    assert!(pf.residual < 1e-8);
}

#[test]
fn amo_gap_edge_reduces_and_opens() {
    let amo = CouplingTriple::amo(2.0);
    let p = centered_dual_eigenpair(&amo, GOLDEN, 0.0, 401).unwrap();
    let pf = parabolic_reduce(&amo, GOLDEN, p.energy, 0.0, &p, &ParabolicConfig::default()).unwrap();
    assert!(pf.residual <= 1e-4, "{}", pf.residual);
    assert!(pf.a.abs() > 1e-3);
    assert!(pf.m11sq > 0.0);
    let cert = gap_opening_certificate(&pf, &[0.0, 1e-2, 1e-3, 1e-4], 200).unwrap();
    assert_eq!(cert.rows[0].trace, 2.0 * pf.d);
    let e = cert.exponent.unwrap();
    assert!((1.8..=2.2).contains(&e), "{e}");

    // moving the energy towards the open side leaves the spectrum
    let ids = ehm_core::spectral::ids_counting(
        &amo,
        GOLDEN,
        &[p.energy + cert.open_side as f64 * 0.01, p.energy - cert.open_side as f64 * 0.01],
        2000,
        2,
        0,
    )
    .unwrap();
    let (inside_gap, _) = (ids.values[0], ids.values[1]);
    let (k, _, r) = ehm_core::spectral::gap_label(inside_gap, &Irrational::golden(), 10);
    assert_eq!(k, 0);
    assert!(r < 5e-3, "{inside_gap}");
}

#[test]
fn generic_phase_is_not_case_b() {
    let amo = CouplingTriple::amo(2.0);
    let p = centered_dual_eigenpair(&amo, GOLDEN, 0.3, 401).unwrap();
    assert!(matches!(
        parabolic_reduce(&amo, GOLDEN, p.energy, 0.3, &p, &ParabolicConfig::default()),
        Err(Error::NotCaseB(_))
    ));
}

#[test]
fn certificate_plug_in_values() {
    let pf = ehm_core::reduce::ParabolicForm {
        alpha: GOLDEN,
        m: vec![Mat2::IDENTITY; 16],
        a: 0.5,
        d: 1.0,
        m11sq: 2.0,
        m11m12: 0.0,
        m12sq: 0.0,
        m1: vec![Mat2::new(0.0, 0.0, 2.0, 0.0); 16],
        residual: 0.0,
        cohomology_residual: 0.0,
        case_b_ratio: 0.0,
        eta_mismatch: 0.0,
        imag_part: 0.0,
    };
    let cert = gap_opening_certificate(&pf, &[0.1], 20).unwrap();
    let row = cert.rows[0];
    assert!((row.predicted - (2.0 - 0.5 * 0.1 * 2.0)).abs() < 1e-15);
    assert!(!row.uniformly_hyperbolic);
    assert_eq!(cert.open_side, -1);
    // constant M₁ needs no conjugation; the trace of M₀ + εM₁ is exact
    assert!((row.trace - 2.0).abs() < 1e-14);
}

#[test]
fn theta_and_rho_agree_at_a_gap_edge() {
    let amo = CouplingTriple::amo(2.0);
    let p = centered_dual_eigenpair(&amo, GOLDEN, 0.0, 401).unwrap();
    let r = theta_rho_consistency(&amo, &Irrational::golden(), p.energy, &ConsistencyConfig::default()).unwrap();
    assert!(r.eigen_residual < 1e-6);
    assert!(r.consistent, "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn completion_first_column_is_the_input(re0 in -5.0f64..5.0, im0 in -5.0f64..5.0, re1 in -5.0f64..5.0, im1 in -5.0f64..5.0) {
        let w = [C64::new(re0, im0), C64::new(re1, im1)];
        prop_assume!(w[0].norm() + w[1].norm() > 1e-3);
        let c = complete_to_sl2(&[w]).unwrap();
        prop_assert!((c.m[0].det() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn scalar_cohomology_solves_single_modes(k in 1i64..50, re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let mut coeffs = vec![C64::new(0.0, 0.0); (2 * k + 1) as usize];
        coeffs[(2 * k) as usize] = C64::new(re, im);
        let tau = TrigPoly::new(-k, coeffs);
        let sol = scalar_cohomology(&tau, GOLDEN, 60).unwrap();
        prop_assert!(sol.residual < 1e-9);
    }
}
