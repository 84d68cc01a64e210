use super::IdsCounter;
use crate::model::{CouplingTriple, FiniteSection, Region};
use crate::numth::{beta_estimate, Irrational};
use crate::prelude::*;
use crate::stats::phase_samples;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum GapStatus {
    /// Wider than the tolerance at every size and not shrinking under doubling.
    Open,
    ClosedAtResolution,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct WidthSample {
    pub size: usize,
    pub e_lo: f64,
    pub e_hi: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LabelProbe {
    pub k: i64,
    pub n_target: f64,
    pub widths: Vec<WidthSample>,
    pub status: GapStatus,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MartiniReport {
    pub labels: Vec<LabelProbe>,
    pub tol: f64,
    pub beta: f64,
    /// Set when `β(α)` does not look small.
    pub beta_warning: bool,
}

impl MartiniReport {
    pub fn get(&self, k: i64) -> Option<&LabelProbe> {
        self.labels.iter().find(|l| l.k == k)
    }
}

const THETA_SAMPLES: usize = 8;
const BETA_WARN: f64 = 0.1;

/// Measures the gap carrying each label `0 < |k| ≤ k_max` at several section sizes.
///
/// At size `n` the gap is the energy interval on which the averaged count stays
/// within `2/n` of `frac(kα)`.
pub fn martini_probe(
    lam: &CouplingTriple,
    a: &Irrational,
    k_max: i64,
    sizes: &[usize],
    tol: f64,
) -> Result<MartiniReport> {
    let region = lam.region();
    if !matches!(region, Region::I | Region::II) {
        return Err(Error::WrongRegion { expected: "I or II", found: region.as_str() });
    }
    if sizes.is_empty() || k_max < 1 {
        return Err(invalid("need at least one size and k_max ≥ 1"));
    }
    let beta = beta_estimate(a, a.depth() / 2)?;
    let (h0, h1) = lam.gershgorin();
    let counters = sizes
        .iter()
        .map(|&n| IdsCounter::new(lam, a.value(), n, THETA_SAMPLES, 0))
        .collect::<Result<Vec<_>>>()?;
    let mut labels = Vec::new();
    for kk in 1..=k_max {
        for k in [kk, -kk] {
            let target = a.frac_mul(k);
            let widths: Vec<WidthSample> = counters
                .iter()
                .map(|c| {
                    let delta = 2.0 / c.section_size() as f64;
                    let e_lo = c.energy_at_level(target - delta, h0, h1, tol * 1e-2);
                    let e_hi = c.energy_at_level(target + delta, h0, h1, tol * 1e-2);
                    WidthSample { size: c.section_size(), e_lo, e_hi, width: (e_hi - e_lo).max(0.0) }
                })
                .collect();
            let all_wide = widths.iter().all(|w| w.width > tol);
            let stable = widths.windows(2).all(|w| w[1].width >= 0.75 * w[0].width);
            let status = if all_wide && stable {
                GapStatus::Open
            } else if widths.last().unwrap().width <= tol {
                GapStatus::ClosedAtResolution
            } else {
                GapStatus::Unresolved
            };
            labels.push(LabelProbe { k, n_target: target, widths, status });
        }
    }
    Ok(MartiniReport { labels, tol, beta, beta_warning: beta > BETA_WARN })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DualityReport {
    /// `sup_{E ∈ Σ_λ} dist(E, λ₂Σ_λ̂)`.
    pub forward: f64,
    /// `sup_{E ∈ λ₂Σ_λ̂} dist(E, Σ_λ)`.
    pub backward: f64,
    pub hausdorff: f64,
    pub kept: (usize, usize),
    pub dropped: (usize, usize),
}

/// Eigenvalues of sections over the phase samples, minus those whose
/// eigenvector sits mostly in the outer tenth at either end.
fn bulk_eigenvalues(lam: &CouplingTriple, alpha: f64, size: usize, thetas: &[f64], scale: f64) -> Result<(Vec<f64>, usize)> {
    let edge = (size / 10).max(1);
    let mut kept = Vec::new();
    let mut dropped = 0;
    for &t in thetas {
        let h = FiniteSection::new(lam, alpha, t, 0, size)?;
        for e in h.eigenvalues_ql()? {
            let w = h.eigenvector_weights(e)?;
            let w_left: f64 = w[..edge].iter().sum();
            let w_right: f64 = w[size - edge..].iter().sum();
            if w_left > 0.5 || w_right > 0.5 {
                dropped += 1;
            } else {
                kept.push(e * scale);
            }
        }
    }
    kept.sort_by(f64::total_cmp);
    Ok((kept, dropped))
}

/// Largest distance from a point of `from` to the sorted set `to`.
fn one_sided(from: &[f64], to: &[f64]) -> f64 {
    from.iter()
        .map(|&x| {
            let i = to.partition_point(|&y| y < x);
            let mut d = f64::INFINITY;
            if i < to.len() {
                d = d.min(to[i] - x);
            }
            if i > 0 {
                d = d.min(x - to[i - 1]);
            }
            d
        })
        .fold(0.0, f64::max)
}

/// Compares `Σ_λ` with `λ₂Σ_λ̂` through finite sections at shared phases.
pub fn duality_check(lam: &CouplingTriple, alpha: f64, section_size: usize, theta_samples: usize) -> Result<DualityReport> {
    lam.require(Region::II)?;
    let thetas = phase_samples(theta_samples.max(1), 0);
    let (sigma, d0) = bulk_eigenvalues(lam, alpha, section_size, &thetas, 1.0)?;
    let (sigma_dual, d1) = bulk_eigenvalues(&lam.dual(), alpha, section_size, &thetas, lam.lambda2)?;
    if sigma.is_empty() || sigma_dual.is_empty() {
        return Err(Error::ConvergenceFailure("every eigenvalue was edge-localised"));
    }
    let forward = one_sided(&sigma, &sigma_dual);
    let backward = one_sided(&sigma_dual, &sigma);
    Ok(DualityReport {
        forward,
        backward,
        hausdorff: forward.max(backward),
        kept: (sigma.len(), sigma_dual.len()),
        dropped: (d0, d1),
    })
}
