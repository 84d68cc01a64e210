//! Fibered rotation number, degree of matrix maps, and a hyperbolicity probe.

use super::{iterate_scaled, CocycleMap};
use crate::prelude::*;

/// Polar angle (turns) of the rotation factor in `M = R(ψ)S`, `S > 0`.
fn polar_angle(m: &Mat2) -> f64 {
    (m.c - m.b).atan2(m.a + m.d) / TAU
}

fn real_matrix(c: &CocycleMap, x: f64) -> Result<Mat2> {
    let m = c.eval(x)?;
    if m.max_imag() > 1e-9 * (1.0 + m.max_abs()) {
        return Err(Error::NotHomotopicToIdentity);
    }
    let r = m.re();
    if r.det() <= 0.0 {
        return Err(Error::NotHomotopicToIdentity);
    }
    Ok(r)
}

/// Unwrapped polar angle on the grid `m/n`, `m = 0..=n`.
struct LiftTable {
    values: Vec<f64>,
}

impl LiftTable {
    #[allow(clippy::mut_range_bound)]
    fn build(c: &CocycleMap) -> Result<Self> {
        let mut n = 1024;
        'refine: loop {
            let mut values = Vec::with_capacity(n + 1);
            let mut last = polar_angle(&real_matrix(c, 0.0)?);
            values.push(last);
            for m in 1..=n {
                let p = polar_angle(&real_matrix(c, m as f64 / n as f64)?);
                let mut step = p - last;
                step -= step.round();
                if step.abs() > 0.2 {
                    if n >= 1 << 18 {
                        return Err(Error::GridTooCoarse { step: step.abs() });
                    }
                    n *= 4;
                    continue 'refine;
                }
                last += step;
                values.push(last);
            }
            let winding = values[n] - values[0];
            if winding.abs() > 0.5 {
                return Err(Error::NotHomotopicToIdentity);
            }
            return Ok(LiftTable { values });
        }
    }

    fn at(&self, x: f64) -> f64 {
        let n = self.values.len() - 1;
        let t = frac(x) * n as f64;
        let i = (t.floor() as usize).min(n - 1);
        let w = t - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }
}

/// Fibered rotation number in `[0, 1)`.
///
/// Each step splits `A = R(ψ)S`; `ψ` follows a continuous lift over the
/// torus and the symmetric factor moves a direction by less than a quarter
/// turn, so the lifted increment is `ψ + δ_S`. The result is the Birkhoff
/// average over `n_samples` starting phases and directions.
pub fn rotation_number(c: &CocycleMap, n_iter: usize, n_samples: usize) -> Result<f64> {
    if !c.homotopic_to_identity() {
        return Err(Error::NotHomotopicToIdentity);
    }
    if n_iter == 0 || n_samples == 0 {
        return Err(invalid("need positive n_iter and n_samples"));
    }
    let table = LiftTable::build(c)?;
    let mut total = 0.0;
    for j in 0..n_samples {
        let x0 = j as f64 / n_samples as f64;
        let a0 = j as f64 / (2 * n_samples) as f64;
        let mut v = [(TAU * a0).cos(), (TAU * a0).sin()];
        let mut acc = crate::stats::KahanSum::default();
        c.for_orbit(x0, n_iter, |k, m| {
            let m = m.re();
            let x = x0 + k as f64 * c.alpha();
            let p = polar_angle(&m);
            let psi = p + (table.at(x) - p).round();
            let w = m.apply(v);
            let u = Mat2::rotation(psi).apply(v);
            let delta = (u[0] * w[1] - u[1] * w[0]).atan2(u[0] * w[0] + u[1] * w[1]) / TAU;
            acc.add(psi + delta);
            let norm = (w[0] * w[0] + w[1] * w[1]).sqrt();
            v = [w[0] / norm, w[1] / norm];
            Ok(())
        })?;
        total += acc.value() / n_iter as f64;
    }
    Ok(frac(total / n_samples as f64))
}

/// Degree of `m: 𝕋 → GL(2, ℝ)` (or of a map on `ℝ/2ℤ` sampled on `[0, 1]`),
/// counted in half turns of the first column.
pub fn degree(m: impl Fn(f64) -> Mat2, grid: usize) -> Result<i64> {
    if grid < 2 {
        return Err(invalid("grid needs at least two points"));
    }
    let angle = |x: f64| {
        let a = m(x);
        a.c.atan2(a.a) / TAU
    };
    let mut last = angle(0.0);
    let mut total = 0.0;
    for k in 1..=grid {
        let p = angle(k as f64 / grid as f64);
        let mut step = p - last;
        step -= step.round();
        if step.abs() >= 0.25 {
            return Err(Error::GridTooCoarse { step: step.abs() });
        }
        total += step;
        last = p;
    }
    Ok((2.0 * total).round() as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum UhVerdict {
    UhLikely,
    NotUh,
    Inconclusive,
}

/// Result of [`uh_probe`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct UhProbe {
    pub verdict: UhVerdict,
    /// Smallest `(1/n) ln‖A_n(x)‖` over the grid.
    pub eta: f64,
    pub cones_ok: bool,
}

fn direction_gap(p: [C64; 2], q: [C64; 2]) -> f64 {
    let cross = (p[0] * q[1] - p[1] * q[0]).norm();
    let np = (p[0].norm_sqr() + p[1].norm_sqr()).sqrt();
    let nq = (q[0].norm_sqr() + q[1].norm_sqr()).sqrt();
    cross / (np * nq)
}

/// Finite-time test for uniform hyperbolicity.
///
/// `uh_likely` needs growth `≥ eta_min` everywhere on the grid plus
/// projective contraction of the forward and backward products onto two
/// distinct directions; `not_uh` is returned once some `‖A_n(x)‖^{1/n} ≤ 1 + tol`.
pub fn uh_probe(c: &CocycleMap, n: usize, grid: usize, eta_min: f64, tol: f64) -> Result<UhProbe> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut eta = f64::INFINITY;
    let mut cones_ok = true;
    let mut bounded = false;
    for j in 0..grid.max(1) {
        let x = j as f64 / grid.max(1) as f64;
        let fwd = iterate_scaled(c, x, n as i64)?;
        let g = fwd.ln_norm() / n as f64;
        eta = eta.min(g);
        if g <= (1.0 + tol).ln() {
            bounded = true;
        }
        if cones_ok {
            let past = iterate_scaled(c, x - n as f64 * c.alpha(), n as i64)?.mat;
            let u1 = past.apply([one, zero]);
            let u2 = past.apply([zero, one]);
            let future = iterate_scaled(c, x + n as f64 * c.alpha(), -(n as i64))?.mat;
            let s1 = future.apply([one, zero]);
            let s2 = future.apply([zero, one]);
            let unstable = if u1[0].norm() + u1[1].norm() >= u2[0].norm() + u2[1].norm() { u1 } else { u2 };
            let stable = if s1[0].norm() + s1[1].norm() >= s2[0].norm() + s2[1].norm() { s1 } else { s2 };
            cones_ok = direction_gap(u1, u2) < 1e-6
                && direction_gap(s1, s2) < 1e-6
                && direction_gap(unstable, stable) > 1e-6;
        }
    }
    let verdict = if eta >= eta_min && cones_ok {
        UhVerdict::UhLikely
    } else if bounded {
        UhVerdict::NotUh
    } else {
        UhVerdict::Inconclusive
    };
    Ok(UhProbe { verdict, eta, cones_ok })
}
