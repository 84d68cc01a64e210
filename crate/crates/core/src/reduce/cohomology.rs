//! Twisted cohomological equations over a circle rotation.

use crate::fourier::TrigPoly;
use crate::prelude::*;

/// Grid used for sup-norm residuals.
const RESIDUAL_GRID: usize = 2048;

/// A solution together with its sup-grid residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Cohomology<T> {
    pub solution: T,
    pub residual: f64,
}

/// Solves `y(x+α) − y(x) = f(x) − [f]` for `|k| ≤ k_max`, with `[y] = 0`.
fn difference_inverse(f: &TrigPoly, alpha: f64, k_max: i64) -> Result<TrigPoly> {
    let f = f.truncate(k_max);
    let mut coeffs = vec![C64::new(0.0, 0.0); f.coeffs.len()];
    for (j, c) in f.coeffs.iter().enumerate() {
        let k = f.lo + j as i64;
        if k == 0 || *c == C64::new(0.0, 0.0) {
            continue;
        }
        let div = cis(k as f64 * alpha) - 1.0;
        if div.norm() < 1e-14 {
            return Err(Error::SmallDivisor { k });
        }
        coeffs[j] = c / div;
    }
    Ok(TrigPoly::new(f.lo, coeffs))
}

fn check_k(k_max: usize) -> Result<i64> {
    if k_max == 0 {
        return Err(invalid("K must be positive"));
    }
    Ok(k_max as i64)
}

fn grid_n(p: &[&TrigPoly]) -> usize {
    let span = p.iter().map(|q| q.lo.unsigned_abs().max(q.hi().unsigned_abs())).max().unwrap_or(0) as usize;
    (4 * span + 4).max(RESIDUAL_GRID).next_power_of_two()
}

/// `ψ` with `−ψ(x+α) + ψ(x) + τ(x) = [τ]`, `ψ̂₀ = 0`, for `0 < |k| ≤ K`.
///
/// The residual is measured against the full `τ`, so modes beyond `K` show up in it.
pub fn scalar_cohomology(tau: &TrigPoly, alpha: f64, k_max: usize) -> Result<Cohomology<TrigPoly>> {
    let k = check_k(k_max)?;
    let psi = difference_inverse(tau, alpha, k)?;
    let n = grid_n(&[tau, &psi]);
    let mean = tau.mean();
    let shifted = psi.translate(alpha).eval_grid(n, 0.0);
    let direct = psi.eval_grid(n, 0.0);
    let t = tau.eval_grid(n, 0.0);
    let residual = (0..n).map(|m| (direct[m] - shifted[m] + t[m] - mean).norm()).fold(0.0, nan_max);
    Ok(Cohomology { solution: psi, residual })
}

/// A 2×2 matrix of trigonometric polynomials, `[[a, b], [c, d]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigMatrix {
    pub entries: [TrigPoly; 4],
}

impl TrigMatrix {
    pub fn new(a: TrigPoly, b: TrigPoly, c: TrigPoly, d: TrigPoly) -> Self {
        TrigMatrix { entries: [a, b, c, d] }
    }

    /// Fourier modes of a 1-periodic matrix map sampled on `m/n`.
    pub fn from_samples(samples: &[CMat2]) -> Self {
        let pick = |f: fn(&CMat2) -> C64| TrigPoly::from_samples(&samples.iter().map(f).collect::<Vec<_>>());
        TrigMatrix::new(pick(|m| m.a), pick(|m| m.b), pick(|m| m.c), pick(|m| m.d))
    }

    pub fn eval(&self, z: C64) -> CMat2 {
        let [a, b, c, d] = &self.entries;
        CMat2::new(a.eval(z), b.eval(z), c.eval(z), d.eval(z))
    }

    pub fn eval_grid(&self, n: usize, eps: f64) -> Vec<CMat2> {
        let v: Vec<Vec<C64>> = self.entries.iter().map(|p| p.eval_grid(n, eps)).collect();
        (0..n).map(|m| CMat2::new(v[0][m], v[1][m], v[2][m], v[3][m])).collect()
    }

    pub fn translate(&self, t: f64) -> Self {
        let [a, b, c, d] = &self.entries;
        TrigMatrix::new(a.translate(t), b.translate(t), c.translate(t), d.translate(t))
    }

    pub fn mean(&self) -> CMat2 {
        let [a, b, c, d] = &self.entries;
        CMat2::new(a.mean(), b.mean(), c.mean(), d.mean())
    }
}

/// `Y` with `Y(x+α)M₀ − M₀Y(x) = M₁(x) − [M₁]` for `M₀ = [[1, a], [0, 1]]`.
///
/// Writing `Δy = y(x+α) − y(x)`, the entries satisfy
/// `Δy₂₁ = F₂₁`, `Δy₁₁ = F₁₁ + a y₂₁`, `Δy₂₂ = F₂₂ − a y₂₁(x+α)` and
/// `Δy₁₂ = F₁₂ − a y₁₁(x+α) + a y₂₂`, solved in that order with zero means.
pub fn matrix_cohomology(a: f64, m1: &TrigMatrix, alpha: f64, k_max: usize) -> Result<Cohomology<TrigMatrix>> {
    let k = check_k(k_max)?;
    let ac = C64::new(a, 0.0);
    let [f11, f12, f21, f22] = &m1.entries;
    let y21 = difference_inverse(f21, alpha, k)?;
    let y11 = difference_inverse(&f11.add(&y21.scale(ac)), alpha, k)?;
    let y22 = difference_inverse(&f22.sub(&y21.translate(alpha).scale(ac)), alpha, k)?;
    let rhs12 = f12.sub(&y11.translate(alpha).scale(ac)).add(&y22.scale(ac));
    let y12 = difference_inverse(&rhs12, alpha, k)?;
    let y = TrigMatrix::new(y11, y12, y21, y22);

    let n = grid_n(&[f11, f12, f21, f22, &y.entries[1]]);
    let m0 = CMat2::new(C64::new(1.0, 0.0), ac, C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    let mean = m1.mean();
    let ys = y.translate(alpha).eval_grid(n, 0.0);
    let y0 = y.eval_grid(n, 0.0);
    let f = m1.eval_grid(n, 0.0);
    let residual = (0..n)
        .map(|m| (ys[m] * m0 - m0 * y0[m] - (f[m] - mean)).max_abs())
        .fold(0.0, nan_max);
    Ok(Cohomology { solution: y, residual })
}
