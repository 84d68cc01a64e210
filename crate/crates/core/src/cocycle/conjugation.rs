//! The analytic conjugacy `Q` taking `A` to `Ã` in region II.

use super::{transfer, Variant};
use crate::fourier::TrigPoly;
use crate::model::{abs_c, c_symbol, c_tilde_symbol, CouplingTriple, Region};
use crate::prelude::*;

/// `Q(z) = e^{f(z)} √|c|(z−α) · diag(1, |c|(z−α)/c(z−α))`, where
/// `2f(x+α) − 2f(x) = ln c(x) − ln c̃(x)`.
#[derive(Debug, Clone)]
pub struct QConjugation {
    lam: CouplingTriple,
    alpha: f64,
    f: TrigPoly,
}

/// Continuous logarithm of a zero-winding loop sampled on `m/n`.
fn log_samples(values: &[C64]) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(values.len());
    let mut arg = values[0].arg();
    out.push(C64::new(values[0].norm().ln(), arg));
    for w in values.windows(2) {
        let mut d = w[1].arg() - w[0].arg();
        d -= TAU * (d / TAU).round();
        arg += d;
        out.push(C64::new(w[1].norm().ln(), arg));
    }
    let mut d = values[0].arg() - values[values.len() - 1].arg();
    d -= TAU * (d / TAU).round();
    let winding = ((arg + d - out[0].im) / TAU).round() as i64;
    if winding != 0 {
        return Err(Error::WindingNonzero(winding));
    }
    Ok(out)
}

/// Solves `2f(x+α) − 2f(x) = g₁ − g₂` by Fourier division with `n_fourier` modes.
pub fn q_conjugation(lam: &CouplingTriple, alpha: f64, n_fourier: usize) -> Result<QConjugation> {
    lam.require(Region::II)?;
    let n = (4 * n_fourier).max(64).next_power_of_two();
    let xs: Vec<f64> = (0..n).map(|m| m as f64 / n as f64).collect();
    let c: Vec<C64> = xs.iter().map(|&x| c_symbol(lam, alpha, C64::new(x, 0.0))).collect();
    let ct: Vec<C64> = xs.iter().map(|&x| c_tilde_symbol(lam, alpha, C64::new(x, 0.0))).collect();
    let g1 = log_samples(&c)?;
    let g2 = log_samples(&ct)?;
    let diff: Vec<C64> = g1.iter().zip(&g2).map(|(a, b)| a - b).collect();
    let dhat = TrigPoly::from_samples(&diff).denoise(1e-15);
    let k_max = n_fourier as i64;
    let mut coeffs = vec![C64::new(0.0, 0.0); 2 * n_fourier + 1];
    for k in -k_max..=k_max {
        if k == 0 {
            continue;
        }
        let div = cis(k as f64 * alpha) - 1.0;
        if div.norm() < 1e-14 {
            return Err(Error::SmallDivisor { k });
        }
        coeffs[(k + k_max) as usize] = dhat.coeff(k) / (div * 2.0);
    }
    Ok(QConjugation { lam: *lam, alpha, f: TrigPoly::new(-k_max, coeffs) })
}

impl QConjugation {
    pub fn f(&self) -> &TrigPoly {
        &self.f
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eval(&self, z: C64) -> Result<CMat2> {
        let zm = z - self.alpha;
        let a = abs_c(&self.lam, self.alpha, zm)?;
        let c = c_symbol(&self.lam, self.alpha, zm);
        let s = self.f.eval(z).exp() * a.sqrt();
        Ok(CMat2::diag(s, s * a / c))
    }

    /// `sup |2f(x+α) − 2f(x) − (g₁ − g₂)(x)|` on `grid` points.
    pub fn cohomology_residual(&self, grid: usize) -> Result<f64> {
        let xs: Vec<f64> = (0..grid).map(|m| m as f64 / grid as f64).collect();
        let c: Vec<C64> = xs.iter().map(|&x| c_symbol(&self.lam, self.alpha, C64::new(x, 0.0))).collect();
        let ct: Vec<C64> = xs.iter().map(|&x| c_tilde_symbol(&self.lam, self.alpha, C64::new(x, 0.0))).collect();
        let g1 = log_samples(&c)?;
        let g2 = log_samples(&ct)?;
        let mut worst = 0.0f64;
        for (i, &x) in xs.iter().enumerate() {
            let lhs = (self.f.eval_real(x + self.alpha) - self.f.eval_real(x)) * 2.0;
            worst = nan_max(worst, (lhs - (g1[i] - g2[i])).norm());
        }
        Ok(worst)
    }

    /// `sup ‖Q(x+α)A(x)Q⁻¹(x) − Ã(x)‖` on `grid` points of the line `Im z = eps`.
    pub fn conjugation_residual(&self, energy: f64, grid: usize, eps: f64) -> Result<f64> {
        let a = transfer(&self.lam, self.alpha, energy, Variant::A)?.complexified(eps)?;
        let at = transfer(&self.lam, self.alpha, energy, Variant::ATilde)?.complexified(eps)?;
        let mut worst = 0.0f64;
        for m in 0..grid {
            let x = m as f64 / grid as f64;
            let z = C64::new(x, eps);
            let lhs = self.eval(z + self.alpha)? * a.eval(x)? * self.eval(z)?.inv();
            worst = nan_max(worst, (lhs - at.eval(x)?).norm());
        }
        Ok(worst)
    }
}
