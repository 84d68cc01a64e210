//! Localization diagnostics on the dual side.

mod audit;
mod green;

pub use audit::{constant_audit, herman_check, AuditMode, AuditParams, AuditReport, AuditRow, HermanRow};
pub use green::{green, regularity, uniformity, GreenEval, GreenMethod, Regularity, Uniformity};

use crate::model::{apply_h, CouplingTriple, FiniteSection, Region};
use crate::numth::ResonanceList;
use crate::prelude::*;
use crate::stats::fit_line;

/// How far (in dual energy units) the nearest section eigenvalue may sit from the target.
pub const NEAREST_WINDOW: f64 = 0.05;

/// An eigenvector of a centred finite section of the dual operator, scaled so that `u_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DualEigenpair {
    /// Eigenvalue of the dual section.
    pub dual_energy: f64,
    /// `λ₂ ×` the dual eigenvalue, on the scale of `Σ_λ`.
    pub energy: f64,
    /// First site of the section.
    pub start: i64,
    pub u: Vec<C64>,
    /// `|u_0|` of the unit eigenvector before rescaling.
    pub center_weight: f64,
}

impl DualEigenpair {
    pub fn center(&self) -> usize {
        (-self.start) as usize
    }

    pub fn at(&self, k: i64) -> Option<C64> {
        let i = k - self.start;
        (0..self.u.len() as i64).contains(&i).then(|| self.u[i as usize])
    }

    /// `max |Hu − Eu|` over sites at least `margin` away from both ends,
    /// with `H` the infinite dual operator.
    pub fn interior_residual(&self, lam: &CouplingTriple, alpha: f64, theta: f64, margin: usize) -> f64 {
        let (s, hu) = apply_h(&lam.dual(), alpha, theta, self.start, &self.u);
        let n = self.u.len();
        (margin..n.saturating_sub(margin))
            .map(|i| {
                let h = hu[(self.start + i as i64 - s) as usize];
                (h - self.u[i] * self.dual_energy).norm()
            })
            .fold(0.0, nan_max)
    }
}

fn centred_section(lam: &CouplingTriple, alpha: f64, theta: f64, section_size: usize) -> Result<FiniteSection> {
    lam.require(Region::II)?;
    if section_size < 3 {
        return Err(invalid("section_size must be at least 3"));
    }
    FiniteSection::new(&lam.dual(), alpha, theta, -((section_size / 2) as i64), section_size)
}

fn normalised(lam: &CouplingTriple, h: &FiniteSection, e: f64) -> Result<DualEigenpair> {
    let mut u = h.eigenvector(e)?;
    let c = (-h.start) as usize;
    let w = u[c].norm();
    if w < 1e-8 {
        return Err(Error::CenterVanishes(w));
    }
    let u0 = u[c];
    u.iter_mut().for_each(|v| *v /= u0);
    Ok(DualEigenpair { dual_energy: e, energy: e * lam.lambda2, start: h.start, u, center_weight: w })
}

/// The dual section eigenvector whose eigenvalue is nearest `e_target/λ₂`.
pub fn dual_eigenpair(
    lam: &CouplingTriple,
    alpha: f64,
    theta: f64,
    e_target: f64,
    section_size: usize,
) -> Result<DualEigenpair> {
    let h = centred_section(lam, alpha, theta, section_size)?;
    let target = e_target / lam.lambda2;
    let e = h.nearest_eigenvalue(target)?;
    if (e - target).abs() > NEAREST_WINDOW {
        return Err(Error::NoNearbyEigenvalue { target, distance: (e - target).abs() });
    }
    normalised(lam, &h, e)
}

/// The dual section eigenvector with the largest weight at site 0.
pub fn centered_dual_eigenpair(lam: &CouplingTriple, alpha: f64, theta: f64, section_size: usize) -> Result<DualEigenpair> {
    let h = centred_section(lam, alpha, theta, section_size)?;
    let c = (-h.start) as usize;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for e in h.eigenvalues_ql()? {
        let w = h.eigenvector_weights(e)?[c];
        if w > best.0 {
            best = (w, e);
        }
    }
    normalised(lam, &h, best.1)
}

/// One window `lo < |k| < hi` between consecutive resonances.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DecayWindow {
    pub j: usize,
    pub n_j: i64,
    pub lo: f64,
    pub hi: f64,
    /// Number of sites used in the fit.
    pub points: usize,
    pub fitted_rate: Option<f64>,
    pub max_abs: f64,
    /// `max |u_k| e^{(ε₁/5)|k|}` over the window.
    pub c3: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DecayProfile {
    /// `|u_k|` for `k = start, start+1, ...`.
    pub u_abs: Vec<f64>,
    pub start: i64,
    pub windows: Vec<DecayWindow>,
    pub threshold: f64,
    pub pass: bool,
}

/// Fewer fitted sites than this leave a window unresolved.
const MIN_FIT_POINTS: usize = 5;
/// Sites below this fraction of `max |u|` are at the round-off floor.
const FLOOR: f64 = 1e-12;

/// Fits `ln|u_k| ≈ a − r|k|` on each resonance window `3(|n_j|+1) < |k| < |n_{j+1}|/3`.
///
/// The outer tenth of the section and values below `1e-12·max|u|` are left out.
pub fn decay_profile(u: &[C64], start: i64, res: &ResonanceList, eps1: f64) -> Result<DecayProfile> {
    let u_abs: Vec<f64> = u.iter().map(|v| v.norm()).collect();
    let end = start + u.len() as i64 - 1;
    let reach = (0.9 * (-start).min(end) as f64).floor();
    let floor = u_abs.iter().copied().fold(0.0, f64::max) * FLOOR;
    let threshold = eps1 / 5.0;
    let mut windows = Vec::new();
    for (j, r) in res.entries.iter().enumerate() {
        let lo = 3.0 * (r.n.abs() as f64 + 1.0);
        let hi = res.next_after(j).unwrap_or(res.k_max) as f64 / 3.0;
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        let (mut max_abs, mut c3) = (0.0f64, 0.0f64);
        let mut k = lo.floor() as i64 + 1;
        while (k as f64) < hi && (k as f64) <= reach {
            for kk in [k, -k] {
                let a = u_abs[(kk - start) as usize];
                if a > floor {
                    xs.push(k as f64);
                    ys.push(a.ln());
                    max_abs = max_abs.max(a);
                    c3 = c3.max(a * (threshold * k as f64).exp());
                }
            }
            k += 1;
        }
        let fitted_rate = if xs.len() >= MIN_FIT_POINTS { fit_line(&xs, &ys).map(|f| -f.slope) } else { None };
        windows.push(DecayWindow { j, n_j: r.n, lo, hi, points: xs.len(), fitted_rate, max_abs, c3 });
    }
    let fitted: Vec<f64> = windows.iter().filter_map(|w| w.fitted_rate).collect();
    if fitted.is_empty() {
        return Err(Error::WindowEmpty);
    }
    let pass = fitted.iter().all(|&r| r >= threshold);
    Ok(DecayProfile { u_abs, start, windows, threshold, pass })
}
