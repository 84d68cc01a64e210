use rand::Rng;

use crate::fourier::TrigPoly;
use crate::model::{det_p, l_tilde, CouplingTriple, Region};
use crate::numth::Irrational;
use crate::prelude::*;
use crate::stats::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum AuditMode {
    /// Deviation of `Σ_{l≠l₀} ln|sin π(x+lα)| + (q_n−1)ln 2` in units of `ln q_n`.
    LogSin,
    /// `‖p‖₀` against the orbit maximum for random polynomials of essential degree `rq_n − 1`.
    TrigPoly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AuditParams {
    /// Denominators `8 ≤ q_n ≤ max_q` are audited.
    pub max_q: u64,
    pub samples: usize,
    /// Degree multiplier for the polynomial audit, capped at `⌊q_{n+1}/q_n⌋`.
    pub r: u64,
}

impl Default for AuditParams {
    fn default() -> Self {
        AuditParams { max_q: 233, samples: 100, r: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AuditRow {
    pub n: usize,
    pub q_n: u64,
    pub q_next: u64,
    pub r: u64,
    /// Largest implied constant over the samples.
    pub implied_max: f64,
    pub implied_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AuditReport {
    pub mode: AuditMode,
    pub rows: Vec<AuditRow>,
    /// Max over the last third of the rows is at most twice the max over the first third.
    pub no_growth: bool,
}

fn log_sin_constant(a: &Irrational, q: u64, x: f64) -> f64 {
    let terms: Vec<f64> = (0..q as i64).map(|l| (PI * (x + a.frac_mul(l))).sin().abs().ln()).collect();
    let l0 = (0..terms.len()).min_by(|&i, &j| terms[i].total_cmp(&terms[j])).unwrap();
    let s: f64 = terms.iter().enumerate().filter(|&(l, _)| l != l0).map(|(_, t)| t).sum();
    (s + (q - 1) as f64 * 2f64.ln()).abs() / (q as f64).ln()
}

/// Smallest `C > 0` with `C·q^{C r} ≥ ratio`.
fn implied_c2(ratio: f64, q_next: u64, r: u64) -> f64 {
    let lq = r as f64 * (q_next as f64).ln();
    let target = ratio.max(1e-300).ln();
    let (mut lo, mut hi) = (-60.0f64, 10.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid + mid.exp() * lq >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi.exp()
}

fn trig_poly_constant(a: &Irrational, q_n: u64, q_next: u64, r: u64, rng: &mut impl Rng) -> f64 {
    let k = (r * q_n - 1) as usize;
    let coeffs: Vec<C64> = (0..=k).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let p = TrigPoly::new(-((k / 2) as i64), coeffs);
    let x0: f64 = rng.gen();
    let sup = p.eval_grid((32 * (k + 1)).next_power_of_two(), 0.0).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let orbit = (0..=k as i64).map(|j| p.eval_real(x0 + a.frac_mul(j)).norm()).fold(0.0, f64::max);
    implied_c2(sup / orbit, q_next, r)
}

/// Implied constants of the two Diophantine bounds across the convergent denominators of `a`.
pub fn constant_audit(a: &Irrational, mode: AuditMode, params: &AuditParams, seed: u64) -> Result<AuditReport> {
    if params.samples == 0 || params.r == 0 {
        return Err(invalid("samples and r must be positive"));
    }
    let mut rng = rng(seed);
    let mut rows = Vec::new();
    let mut last_q = 0;
    for n in 0..a.depth().saturating_sub(1) {
        let (Some(q), Some(q_next)) = (a.q_u64(n), a.q_u64(n + 1)) else { break };
        if q > params.max_q {
            break;
        }
        if q < 8 || q == last_q {
            continue;
        }
        last_q = q;
        let r = params.r.min(q_next / q).max(1);
        let vals: Vec<f64> = (0..params.samples)
            .map(|_| match mode {
                AuditMode::LogSin => log_sin_constant(a, q, rng.gen()),
                AuditMode::TrigPoly => trig_poly_constant(a, q, q_next, r, &mut rng),
            })
            .collect();
        let implied_max = vals.iter().copied().fold(0.0, f64::max);
        let implied_mean = vals.iter().sum::<f64>() / vals.len() as f64;
        rows.push(AuditRow { n, q_n: q, q_next, r, implied_max, implied_mean });
    }
    if rows.is_empty() {
        return Err(invalid("no denominators in the audited range"));
    }
    let third = rows.len().div_ceil(3);
    let head = rows[..third].iter().map(|r| r.implied_max).fold(0.0, f64::max);
    let tail = rows[rows.len() - third..].iter().map(|r| r.implied_max).fold(0.0, f64::max);
    Ok(AuditReport { mode, rows, no_growth: tail <= 2.0 * head })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HermanRow {
    pub k: usize,
    /// Grid mean of `ln|P_k|` for the dual operator.
    pub mean_log: f64,
    /// `k L̃`
    pub bound: f64,
    pub holds: bool,
}

/// Checks `∫ ln|P_k| ≥ k L̃` numerically on a phase grid.
///
/// `P_k` has real zeros, so the midpoint rule converges slowly; grids of
/// `10⁴` points or more are needed to resolve margins of order `10⁻²`.
pub fn herman_check(lam: &CouplingTriple, alpha: f64, energy: f64, ks: &[usize], grid: usize) -> Result<Vec<HermanRow>> {
    lam.require(Region::II)?;
    if grid == 0 {
        return Err(invalid("grid must be positive"));
    }
    let dual = lam.dual();
    let lt = l_tilde(lam);
    Ok(ks
        .iter()
        .map(|&k| {
            let mean_log = (0..grid)
                .map(|m| {
                    let theta = (m as f64 + 0.5) / grid as f64;
                    det_p(&dual, alpha, theta, energy, k).ln_abs(k)
                })
                .sum::<f64>()
                / grid as f64;
            let bound = k as f64 * lt;
            HermanRow { k, mean_log, bound, holds: mean_log >= bound - 1e-9 * (1.0 + bound.abs()) }
        })
        .collect())
}
