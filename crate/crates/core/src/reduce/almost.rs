//! Conjugating `Ã` towards a rotation from a localized dual eigenvector.

use crate::cocycle::{degree, q_conjugation, rotation_number, transfer, QConjugation, Variant};
use crate::fourier::{TrigPoly, TrigVector};
use crate::localize::{centered_dual_eigenpair, DualEigenpair};
use crate::model::{c_symbol, epsilon1, CouplingTriple, Region};
use crate::numth::{resonances, torus_norm, Irrational, ResonanceList};
use crate::prelude::*;

/// Imaginary heights at which strip sup-norms are sampled.
pub const STRIP_HEIGHTS: usize = 5;

/// `U(x)` built from a truncated dual eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct UField {
    pub theta: f64,
    pub energy: f64,
    /// The window `[x₁, x₂]`.
    pub window: (i64, i64),
    /// `U(x) = (e^{2πiθ}u(x), u(x−α))`.
    pub u: TrigVector,
    /// `c(x)G(x) = D(x)U(x) − c(x)e^{2πiθ}U(x+α)`, a trigonometric polynomial.
    pub defect: TrigVector,
    /// Fourier mass of the defect outside `{x₁−1, x₁, x₂, x₂+1}`.
    pub leak: f64,
    /// `sup |G|` over the strip `|Im z| ≤ ε₁/20π`.
    pub defect_strip: f64,
}

/// Builds `U` from the coefficients `u_k`, `k ≥ start`, restricted to `|k| ≤ window`.
pub fn build_u(
    lam: &CouplingTriple,
    alpha: f64,
    theta: f64,
    energy: f64,
    u: &[C64],
    start: i64,
    window: i64,
) -> Result<UField> {
    lam.require(Region::II)?;
    let end = start + u.len() as i64 - 1;
    if window < 0 || -window < start || window > end {
        return Err(invalid(format!("window ±{window} not inside the sites {start}..={end}")));
    }
    if (u[(-start) as usize] - 1.0).norm() > 1e-12 {
        return Err(invalid("u must be normalised with u_0 = 1"));
    }
    let (x1, x2) = (-window, window);
    let coeffs = u[(x1 - start) as usize..=(x2 - start) as usize].to_vec();
    let ui = TrigPoly::new(x1, coeffs);

    let h = (-PI * alpha, PI * alpha);
    let c = TrigPoly::new(-1, vec![C64::from_polar(lam.lambda1, h.0), C64::new(lam.lambda2, 0.0), C64::from_polar(lam.lambda3, h.1)]);
    let ct_back = TrigPoly::new(-1, vec![C64::from_polar(lam.lambda3, h.1), C64::new(lam.lambda2, 0.0), C64::from_polar(lam.lambda1, h.0)]);
    let ev = TrigPoly::new(-1, vec![C64::new(-1.0, 0.0), C64::new(energy, 0.0), C64::new(-1.0, 0.0)]);

    let phase = cis(theta);
    let defect = ev
        .mul(&ui)
        .scale(phase)
        .sub(&ct_back.mul(&ui.translate(-alpha)))
        .sub(&c.mul(&ui.translate(alpha)).scale(phase * phase));
    let leak = defect.mass_outside(&[x1 - 1, x1, x2, x2 + 1]);
    if leak > 1e-10 {
        return Err(Error::SupportLeak(leak));
    }

    let r = epsilon1(lam)? / (20.0 * PI);
    let n = 2048;
    let mut defect_strip: f64 = 0.0;
    for j in 0..STRIP_HEIGHTS {
        let eps = -r + 2.0 * r * j as f64 / (STRIP_HEIGHTS - 1) as f64;
        for (m, d) in defect.eval_grid(n, eps).iter().enumerate() {
            let cz = c_symbol(lam, alpha, C64::new(m as f64 / n as f64, eps));
            defect_strip = nan_max(defect_strip, (d / cz).norm());
        }
    }

    Ok(UField {
        theta,
        energy,
        window: (x1, x2),
        u: TrigVector::new(ui.scale(phase), ui.translate(-alpha)),
        defect: TrigVector::new(defect, TrigPoly::zero()),
        leak,
        defect_strip,
    })
}

/// The conjugacy `W₂` for one window, with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConjugacyResult {
    pub window: i64,
    pub n_j: i64,
    /// `θ̃ = θ − n_jα/2`.
    pub theta_tilde: f64,
    /// `+1` when `W₁ = (S, T)`, `−1` when `W₁ = (S, −T)`.
    pub orientation: i8,
    /// `W₂(m/grid)`, `m = 0..grid`.
    pub w2: Vec<Mat2>,
    pub measured_degree: i64,
    /// `sup |W₂⁻¹(x+α)Ã(x)W₂(x) − R_{∓θ̃}|` on the grid.
    pub defect: f64,
    /// `1/‖2θ − n_jα‖`.
    pub l_value: f64,
    pub det_min: f64,
    pub det_max: f64,
    /// `sup ‖W₂‖` on the grid.
    pub w_norm: f64,
    /// `sup |det W₂ − 1|`.
    pub det_error: f64,
    /// Strip sup-norm of the `U` defect.
    pub defect_strip: f64,
}

/// `W₁ = (Re Ũ₀, ±Im Ũ₀)` and `W₂ = W₁/√det W₁`, with `Ũ₀ = Q(x)e^{πin_jx}U(x)`.
pub fn build_w(
    field: &UField,
    lam: &CouplingTriple,
    alpha: f64,
    n_j: i64,
    q: &QConjugation,
    grid: usize,
) -> Result<ConjugacyResult> {
    if grid < 16 {
        return Err(invalid("grid needs at least 16 points"));
    }
    let u_shift = TrigVector::new(field.u.comps[0].translate(alpha), field.u.comps[1].translate(alpha));
    let tilde0 = |x: f64, v: [C64; 2]| -> Result<[C64; 2]> {
        let w = q.eval(C64::new(x, 0.0))?.apply(v);
        let p = cis(0.5 * n_j as f64 * x);
        Ok([w[0] * p, w[1] * p])
    };
    let here = field.u.eval_grid(grid, 0.0);
    let there = u_shift.eval_grid(grid, 0.0);
    let mut w_here = Vec::with_capacity(grid + 1);
    let mut w_there = Vec::with_capacity(grid);
    for m in 0..=grid {
        let x = m as f64 / grid as f64;
        let v = if m == grid { field.u.eval_real(1.0) } else { here[m] };
        w_here.push(tilde0(x, v)?);
        if m < grid {
            w_there.push(tilde0(x + alpha, there[m])?);
        }
    }
    let det = |v: &[C64; 2]| v[0].re * v[1].im - v[1].re * v[0].im;
    let dets: Vec<f64> = w_here.iter().map(det).collect();
    let det_min = dets.iter().map(|d| d.abs()).fold(f64::INFINITY, f64::min);
    let same_sign = dets.iter().all(|d| d.signum() == dets[0].signum());
    if det_min < 1e-14 || !same_sign {
        return Err(Error::DetVanishes(det_min));
    }
    let orientation: i8 = if dets[0] > 0.0 { 1 } else { -1 };
    let sigma = orientation as f64;
    let normalise = |v: &[C64; 2]| {
        let s = (sigma * det(v)).sqrt();
        Mat2::new(v[0].re / s, sigma * v[0].im / s, v[1].re / s, sigma * v[1].im / s)
    };
    let w2: Vec<Mat2> = w_here.iter().map(normalise).collect();

    let theta_tilde = field.theta - 0.5 * n_j as f64 * alpha;
    let target = Mat2::rotation(-sigma * theta_tilde);
    let at = transfer(lam, alpha, field.energy, Variant::ATilde)?;
    let mut defect: f64 = 0.0;
    for m in 0..grid {
        let x = m as f64 / grid as f64;
        let a = at.eval(x)?.re();
        let conj = normalise(&w_there[m]).inv() * a * w2[m];
        defect = nan_max(defect, (conj - target).max_abs());
    }
    let measured_degree = degree(|x| w2[(x * grid as f64).round() as usize], grid)?;
    let dabs: Vec<f64> = dets.iter().map(|d| d.abs()).collect();
    Ok(ConjugacyResult {
        window: field.window.1,
        n_j,
        theta_tilde,
        orientation,
        measured_degree,
        defect,
        l_value: 1.0 / torus_norm(2.0 * field.theta - n_j as f64 * alpha),
        det_min,
        det_max: dabs.iter().cloned().fold(0.0, f64::max),
        w_norm: w2.iter().map(|m| m.norm()).fold(0.0, nan_max),
        det_error: w2.iter().map(|m| (m.det() - 1.0).abs()).fold(0.0, nan_max),
        defect_strip: field.defect_strip,
        w2,
    })
}

/// A phase whose centred dual eigenvalue matches a given energy.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaFit {
    pub theta: f64,
    pub eigenpair: DualEigenpair,
    /// `|λ₂ e_dual(θ) − E|`.
    pub eigen_residual: f64,
}

/// Finite-section surrogate for `θ(E)`: scans `θ ∈ [0, 1/2]` (the centred
/// eigenvalue is even in `θ`), then golden-section refines the best cell.
pub fn locate_theta(
    lam: &CouplingTriple,
    alpha: f64,
    energy: f64,
    section_size: usize,
    scan: usize,
) -> Result<ThetaFit> {
    if scan < 4 {
        return Err(invalid("scan needs at least 4 points"));
    }
    let miss = |t: f64| -> Result<f64> {
        Ok((centered_dual_eigenpair(lam, alpha, t, section_size)?.energy - energy).abs())
    };
    let step = 0.5 / scan as f64;
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..=scan {
        let t = i as f64 * step;
        let d = miss(t)?;
        if d < best.0 {
            best = (d, t);
        }
    }
    let (mut lo, mut hi) = (best.1 - step, best.1 + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (miss(x1)?, miss(x2)?);
    for _ in 0..60 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = miss(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = miss(x2)?;
        }
    }
    let theta = if f1.min(f2) < best.0 {
        frac(if f1 <= f2 { x1 } else { x2 })
    } else {
        best.1
    };
    let eigenpair = centered_dual_eigenpair(lam, alpha, theta, section_size)?;
    let eigen_residual = (eigenpair.energy - energy).abs();
    Ok(ThetaFit { theta, eigenpair, eigen_residual })
}

/// Parameters of [`almost_reduce`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ArConfig {
    /// Phase points for `W₂` and the defect.
    pub grid: usize,
    pub epsilon0: f64,
    pub k_max: i64,
    pub section_size: usize,
    /// Threshold below which `n = |n_j| + 1` is flagged as too small.
    pub n0: i64,
    /// Use this phase instead of locating `θ(E)`.
    pub theta: Option<f64>,
    pub theta_scan: usize,
    pub q_modes: usize,
    /// Iterations for the rotation-number check; `0` skips it.
    pub rotation_iter: usize,
}

impl Default for ArConfig {
    fn default() -> Self {
        ArConfig {
            grid: 2048,
            epsilon0: 0.2,
            k_max: 200,
            section_size: 401,
            n0: 8,
            theta: None,
            theta_scan: 200,
            q_modes: 128,
            rotation_iter: 0,
        }
    }
}

/// Outcome of [`almost_reduce`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AlmostReduction {
    pub energy: f64,
    pub theta: f64,
    pub eigen_residual: f64,
    pub resonances: ResonanceList,
    pub n_j: i64,
    /// `n = |n_j| + 1`.
    pub n: i64,
    /// `N = |n_{j+1}|`, if a later resonance was found.
    pub big_n: Option<i64>,
    /// `n ≤ N₀`: the statement does not cover this case.
    pub small_n: bool,
    pub results: Vec<ConjugacyResult>,
    /// Defects strictly decrease with the window size.
    pub trend_ok: bool,
    /// `min_± ‖ρ(α, Ã) ∓ θ̃ − (m/2)α‖` for the last window.
    pub rotation_residual: Option<f64>,
}

impl AlmostReduction {
    /// `(C, c)` from a least-squares fit of `ln defect ≈ ln C − c·window`.
    pub fn fitted_decay(&self) -> Option<(f64, f64)> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .results
            .iter()
            .filter(|r| r.defect > 0.0)
            .map(|r| (r.window as f64, r.defect.ln()))
            .unzip();
        crate::stats::fit_line(&xs, &ys).map(|f| (f.intercept.exp(), -f.slope))
    }
}

/// Runs [`build_u`] and [`build_w`] over increasing windows.
pub fn almost_reduce(
    lam: &CouplingTriple,
    a: &Irrational,
    energy: f64,
    j: usize,
    window_sizes: &[i64],
    cfg: &ArConfig,
) -> Result<AlmostReduction> {
    lam.require(Region::II)?;
    let alpha = a.value();
    if window_sizes.is_empty() {
        return Err(invalid("need at least one window size"));
    }
    let (theta, eigenpair, eigen_residual) = match cfg.theta {
        Some(t) => {
            let ep = centered_dual_eigenpair(lam, alpha, t, cfg.section_size)?;
            let r = (ep.energy - energy).abs();
            (t, ep, r)
        }
        None => {
            let fit = locate_theta(lam, alpha, energy, cfg.section_size, cfg.theta_scan)?;
            (fit.theta, fit.eigenpair, fit.eigen_residual)
        }
    };
    let res = resonances(theta, a, cfg.epsilon0, cfg.k_max)?;
    let n_j = res
        .entries
        .get(j)
        .ok_or_else(|| invalid(format!("only {} resonances found", res.entries.len())))?
        .n;
    let q = q_conjugation(lam, alpha, cfg.q_modes)?;
    let mut results = Vec::with_capacity(window_sizes.len());
    for &w in window_sizes {
        let field = build_u(lam, alpha, theta, eigenpair.energy, &eigenpair.u, eigenpair.start, w)?;
        results.push(build_w(&field, lam, alpha, n_j, &q, cfg.grid)?);
    }
    let trend_ok = results.windows(2).all(|p| p[1].defect < p[0].defect);
    let rotation_residual = if cfg.rotation_iter > 0 {
        let last = results.last().expect("non-empty");
        let at = transfer(lam, alpha, eigenpair.energy, Variant::ATilde)?;
        let rho = rotation_number(&at, cfg.rotation_iter, 16)?;
        let half = 0.5 * last.measured_degree as f64 * alpha;
        let r = [1.0, -1.0]
            .iter()
            .map(|s| torus_norm(rho - s * last.theta_tilde - half).min(torus_norm(rho - s * last.theta_tilde + half)))
            .fold(f64::INFINITY, f64::min);
        Some(r)
    } else {
        None
    };
    let n = n_j.abs() + 1;
    Ok(AlmostReduction {
        energy: eigenpair.energy,
        theta,
        eigen_residual,
        big_n: res.next_after(j),
        resonances: res,
        n_j,
        n,
        small_n: n <= cfg.n0,
        results,
        trend_ok,
        rotation_residual,
    })
}

/// How `θ(E)` and `ρ(α, Ã_E)` line up with `αℤ + ℤ`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ThetaRhoReport {
    pub energy: f64,
    pub theta: f64,
    pub eigen_residual: f64,
    pub rho: f64,
    /// `(k, ‖2θ − kα‖)` minimising over `|k| ≤ k_max`.
    pub theta_label: (i64, f64),
    pub rho_label: (i64, f64),
    pub theta_resonances: ResonanceList,
    pub rho_resonances: ResonanceList,
    /// Both labels below `tol` or both above it.
    pub consistent: bool,
}

/// Parameters of [`theta_rho_consistency`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConsistencyConfig {
    pub section_size: usize,
    pub theta_scan: usize,
    pub k_max: i64,
    pub epsilon0: f64,
    pub rotation_iter: usize,
    pub rotation_samples: usize,
    pub tol: f64,
}

impl Default for ConsistencyConfig {
    fn default() -> Self {
        ConsistencyConfig {
            section_size: 401,
            theta_scan: 200,
            k_max: 20,
            epsilon0: 0.2,
            rotation_iter: 20000,
            rotation_samples: 16,
            tol: 1e-3,
        }
    }
}

fn best_label(x: f64, a: &Irrational, k_max: i64) -> (i64, f64) {
    (-k_max..=k_max)
        .map(|k| (k, a.dist(x, k)))
        .fold((0, f64::INFINITY), |b, c| if c.1 < b.1 - 1e-15 || (c.1 <= b.1 + 1e-15 && c.0.abs() < b.0.abs()) { c } else { b })
}

/// Compares the labels of `2θ(E)` and `2ρ(α, Ã_E)` in `αℤ + ℤ`.
pub fn theta_rho_consistency(
    lam: &CouplingTriple,
    a: &Irrational,
    energy: f64,
    cfg: &ConsistencyConfig,
) -> Result<ThetaRhoReport> {
    let alpha = a.value();
    let fit = locate_theta(lam, alpha, energy, cfg.section_size, cfg.theta_scan)?;
    let at = transfer(lam, alpha, energy, Variant::ATilde)?;
    let rho = rotation_number(&at, cfg.rotation_iter, cfg.rotation_samples)?;
    let theta_label = best_label(2.0 * fit.theta, a, cfg.k_max);
    let rho_label = best_label(2.0 * rho, a, cfg.k_max);
    Ok(ThetaRhoReport {
        energy,
        theta: fit.theta,
        eigen_residual: fit.eigen_residual,
        rho,
        consistent: (theta_label.1 <= cfg.tol) == (rho_label.1 <= cfg.tol),
        theta_label,
        rho_label,
        theta_resonances: resonances(fit.theta, a, cfg.epsilon0, cfg.k_max)?,
        rho_resonances: resonances(rho, a, cfg.epsilon0, cfg.k_max)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_window_has_degenerate_support() {
        let lam = CouplingTriple::amo(2.0);
        let f = build_u(&lam, 0.618, 0.1, 0.5, &[C64::new(1.0, 0.0)], 0, 0).unwrap();
        assert_eq!(f.leak, 0.0);
        assert_eq!(f.defect.comps[0].lo, -1);
        assert_eq!(f.defect.comps[0].hi(), 1);
    }

    #[test]
    fn eigenvector_defect_sits_on_the_boundary() {
        let lam = CouplingTriple::new(0.1, 2.0, 0.3).unwrap();
        let alpha = 0.618_033_988_749_894_8;
        let ep = centered_dual_eigenpair(&lam, alpha, 0.3, 201).unwrap();
        let f = build_u(&lam, alpha, 0.3, ep.energy, &ep.u, ep.start, 12).unwrap();
        assert!(f.leak < 1e-12, "leak {}", f.leak);
        let inner = f.defect.comps[0].coeff(12).norm();
        assert!(inner > 1e-8);
    }

    #[test]
    fn window_outside_section_is_rejected() {
        let lam = CouplingTriple::amo(2.0);
        let u = vec![C64::new(1.0, 0.0); 5];
        assert!(build_u(&lam, 0.618, 0.1, 0.5, &u, -2, 3).is_err());
    }
}
