//! Spectra, the integrated density of states, gaps and their labels.

mod probe;
mod rational;

pub use probe::{duality_check, martini_probe, DualityReport, GapStatus, LabelProbe, MartiniReport, WidthSample};
pub use rational::{spectrum_rational, SpectrumApprox, SpectrumMethod};

use crate::cocycle::{rotation_number, transfer, Variant};
use crate::model::{CouplingTriple, FiniteSection};
use crate::numth::Irrational;
use crate::prelude::*;
use crate::stats::phase_samples;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum IdsMethod {
    SturmCount,
    Rotation,
}

/// `N(E)` sampled on an energy grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IDSCurve {
    pub energies: Vec<f64>,
    pub values: Vec<f64>,
    pub method: IdsMethod,
    /// Section size (counting) or iteration count (rotation).
    pub resolution: usize,
    pub theta_samples: usize,
}

impl IDSCurve {
    /// `N` at `e` by linear interpolation (clamped at the ends).
    pub fn at(&self, e: f64) -> f64 {
        let i = self.energies.partition_point(|&x| x <= e);
        if i == 0 {
            return self.values[0];
        }
        if i >= self.energies.len() {
            return *self.values.last().unwrap();
        }
        let (e0, e1) = (self.energies[i - 1], self.energies[i]);
        let w = (e - e0) / (e1 - e0);
        self.values[i - 1] * (1.0 - w) + self.values[i] * w
    }
}

/// `n` equally spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// θ-averaged eigenvalue counting of finite sections.
#[derive(Debug, Clone)]
pub struct IdsCounter {
    sections: Vec<FiniteSection>,
}

impl IdsCounter {
    pub fn new(lam: &CouplingTriple, alpha: f64, section_size: usize, theta_samples: usize, seed: u64) -> Result<Self> {
        if section_size < 100 {
            return Err(invalid("section_size must be at least 100"));
        }
        let sections = phase_samples(theta_samples.max(1), seed)
            .into_iter()
            .map(|t| FiniteSection::new(lam, alpha, t, 0, section_size))
            .collect::<Result<_>>()?;
        Ok(IdsCounter { sections })
    }

    pub fn section_size(&self) -> usize {
        self.sections[0].size()
    }

    pub fn theta_samples(&self) -> usize {
        self.sections.len()
    }

    /// Averaged fraction of eigenvalues below `e`.
    pub fn n_at(&self, e: f64) -> f64 {
        let total: usize = self.sections.iter().map(|s| s.count_below(e)).sum();
        total as f64 / (self.section_size() * self.sections.len()) as f64
    }

    /// Smallest `e` (to `tol`) with `N(e) ≥ level`, searched inside `[lo, hi]`.
    pub fn energy_at_level(&self, level: f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.n_at(mid) >= level {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// `N(E)` from averaged Sturm counts.
pub fn ids_counting(
    lam: &CouplingTriple,
    alpha: f64,
    e_grid: &[f64],
    section_size: usize,
    theta_samples: usize,
    seed: u64,
) -> Result<IDSCurve> {
    let counter = IdsCounter::new(lam, alpha, section_size, theta_samples, seed)?;
    Ok(IDSCurve {
        energies: e_grid.to_vec(),
        values: e_grid.iter().map(|&e| counter.n_at(e)).collect(),
        method: IdsMethod::SturmCount,
        resolution: section_size,
        theta_samples: counter.theta_samples(),
    })
}

/// `N = 1 − 2ρ` from the rotation number of `Ã`.
pub fn ids_rotation(
    lam: &CouplingTriple,
    alpha: f64,
    e_grid: &[f64],
    n_iter: usize,
    n_samples: usize,
) -> Result<IDSCurve> {
    let values = e_grid
        .iter()
        .map(|&e| {
            let c = transfer(lam, alpha, e, Variant::ATilde)?;
            let rho = rotation_number(&c, n_iter, n_samples)?;
            Ok(ids_from_rotation(rho))
        })
        .collect::<Result<_>>()?;
    Ok(IDSCurve {
        energies: e_grid.to_vec(),
        values,
        method: IdsMethod::Rotation,
        resolution: n_iter,
        theta_samples: n_samples,
    })
}

/// `1 − 2ρ` with `ρ` read in `(−1/4, 3/4]`, clamped to `[0, 1]`.
pub fn ids_from_rotation(rho: f64) -> f64 {
    let r = if rho > 0.75 { rho - 1.0 } else { rho };
    (1.0 - 2.0 * r).clamp(0.0, 1.0)
}

/// One detected gap.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GapEntry {
    pub e_minus: f64,
    pub e_plus: f64,
    pub width: f64,
    pub n_value: f64,
    pub label_k: Option<i64>,
    pub label_m: Option<i64>,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GapTable {
    pub entries: Vec<GapEntry>,
    pub plateau_tol: f64,
    pub min_width: f64,
}

/// Greedy left-anchored maximal runs with `N` varying by at most `tol`,
/// excluding runs that touch either end of the grid.
fn plateau_runs(values: &[f64], tol: f64) -> Vec<(usize, usize)> {
    let n = values.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[j + 1] - values[i] <= tol {
            j += 1;
        }
        if j > i {
            if i > 0 && j < n - 1 {
                out.push((i, j));
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Plateaus of `N` of width at least `min_width` that are also found on the
/// half-resolution (every other point) grid.
pub fn detect_gaps(curve: &IDSCurve, plateau_tol: f64, min_width: f64) -> GapTable {
    let e = &curve.energies;
    let full = plateau_runs(&curve.values, plateau_tol);
    let half_values: Vec<f64> = curve.values.iter().step_by(2).copied().collect();
    let half_e: Vec<f64> = e.iter().step_by(2).copied().collect();
    let half: Vec<(f64, f64)> =
        plateau_runs(&half_values, plateau_tol).into_iter().map(|(i, j)| (half_e[i], half_e[j])).collect();
    let mut entries = Vec::new();
    for (i, j) in full {
        let (lo, hi) = (e[i], e[j]);
        if hi - lo < min_width {
            continue;
        }
        if !half.iter().any(|&(a, b)| a < hi && b > lo) {
            continue;
        }
        let inner = &curve.values[i..=j];
        let mut sorted = inner.to_vec();
        sorted.sort_by(f64::total_cmp);
        entries.push(GapEntry {
            e_minus: lo,
            e_plus: hi,
            width: hi - lo,
            n_value: sorted[sorted.len() / 2],
            label_k: None,
            label_m: None,
            residual: None,
        });
    }
    GapTable { entries, plateau_tol, min_width }
}

/// `(k, m, residual)` minimising `|n − kα − m|` over `|k| ≤ k_max`; ties go to smaller `|k|`.
pub fn gap_label(n_value: f64, a: &Irrational, k_max: i64) -> (i64, i64, f64) {
    let mut best = (0, n_value.round() as i64, (n_value - n_value.round()).abs());
    for kk in 1..=k_max {
        for k in [kk, -kk] {
            let ka = k as f64 * a.value();
            let m = (n_value - ka).round();
            let res = (n_value - ka - m).abs();
            if res < best.2 - 1e-15 {
                best = (k, m as i64, res);
            }
        }
    }
    best
}

impl GapTable {
    /// Fills labels using [`gap_label`].
    pub fn label(mut self, a: &Irrational, k_max: i64) -> Self {
        for g in &mut self.entries {
            let (k, m, r) = gap_label(g.n_value, a, k_max);
            g.label_k = Some(k);
            g.label_m = Some(m);
            g.residual = Some(r);
        }
        self
    }
}

/// Options for [`gap_table`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GapScan {
    pub e_points: usize,
    pub section_size: usize,
    pub theta_samples: usize,
    pub seed: u64,
    pub min_width: f64,
    pub k_max: i64,
}

/// Labelled plateaus that persist when the section size doubles.
///
/// Each curve uses `plateau_tol = 2/size`; a plateau of the doubled curve is
/// kept when it overlaps a plateau of the base curve.
pub fn gap_table(lam: &CouplingTriple, a: &Irrational, scan: &GapScan) -> Result<(GapTable, IDSCurve)> {
    let (lo, hi) = lam.gershgorin();
    let grid = linspace(lo, hi, scan.e_points);
    let base = ids_counting(lam, a.value(), &grid, scan.section_size, scan.theta_samples, scan.seed)?;
    let fine = ids_counting(lam, a.value(), &grid, 2 * scan.section_size, scan.theta_samples, scan.seed)?;
    let t_base = detect_gaps(&base, 2.0 / scan.section_size as f64, scan.min_width);
    let mut t_fine = detect_gaps(&fine, 1.0 / scan.section_size as f64, scan.min_width);
    t_fine
        .entries
        .retain(|g| t_base.entries.iter().any(|b| b.e_minus < g.e_plus && b.e_plus > g.e_minus));
    Ok((t_fine.label(a, scan.k_max), fine))
}
