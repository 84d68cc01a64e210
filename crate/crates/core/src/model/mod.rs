//! Couplings, regions, the duality map and the symbols `c`, `c̃`, `|c|`.

mod section;

pub use section::{det_p, finite_section_eigs, FiniteSection, PSequence, SectionEigs, SectionMode};

use crate::prelude::*;

/// The couplings `(λ₁, λ₂, λ₃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CouplingTriple {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

/// Parameter-space region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Region {
    I,
    II,
    III,
    Boundary,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
            Region::Boundary => "boundary",
        }
    }
}

impl core::fmt::Display for Region {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl CouplingTriple {
    pub fn new(lambda1: f64, lambda2: f64, lambda3: f64) -> Result<Self> {
        let all_finite = lambda1.is_finite() && lambda2.is_finite() && lambda3.is_finite();
        if !all_finite || lambda1 < 0.0 || lambda3 < 0.0 || lambda2 <= 0.0 {
            return Err(invalid("couplings must be finite, nonnegative, with λ₂ > 0"));
        }
        Ok(CouplingTriple { lambda1, lambda2, lambda3 })
    }

    /// The almost Mathieu segment `(0, λ₂, 0)`.
    pub fn amo(lambda2: f64) -> Self {
        CouplingTriple { lambda1: 0.0, lambda2, lambda3: 0.0 }
    }

    pub fn region(&self) -> Region {
        classify_region(self)
    }

    pub fn dual(&self) -> Self {
        dual(self)
    }

    /// Gershgorin hull `[−2−2Σλ, 2+2Σλ]` containing every finite-section spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 + 2.0 * (self.lambda1 + self.lambda2 + self.lambda3);
        (-r, r)
    }

    /// `λ₂² − 4λ₁λ₃`, clamped at 0.
    fn disc(&self) -> f64 {
        (self.lambda2 * self.lambda2 - 4.0 * self.lambda1 * self.lambda3).max(0.0)
    }

    pub(crate) fn require(&self, expected: Region) -> Result<()> {
        let found = self.region();
        if found == expected {
            Ok(())
        } else {
            Err(Error::WrongRegion { expected: expected.as_str(), found: found.as_str() })
        }
    }
}

pub fn classify_region(lam: &CouplingTriple) -> Region {
    let s = lam.lambda1 + lam.lambda3;
    let l2 = lam.lambda2;
    if s.max(l2) < 1.0 {
        Region::I
    } else if s.max(1.0) < l2 {
        Region::II
    } else if l2.max(1.0) < s {
        Region::III
    } else {
        Region::Boundary
    }
}

/// `σ(λ) = (λ₃/λ₂, 1/λ₂, λ₁/λ₂)`.
pub fn dual(lam: &CouplingTriple) -> CouplingTriple {
    CouplingTriple {
        lambda1: lam.lambda3 / lam.lambda2,
        lambda2: 1.0 / lam.lambda2,
        lambda3: lam.lambda1 / lam.lambda2,
    }
}

/// `ln((λ₂+√(λ₂²−4λ₁λ₃)) / (m+√(m²−4λ₁λ₃)))`.
fn log_ratio(lam: &CouplingTriple, m: f64) -> f64 {
    let num = lam.lambda2 + lam.disc().sqrt();
    let den = m + (m * m - 4.0 * lam.lambda1 * lam.lambda3).max(0.0).sqrt();
    if den == 0.0 {
        f64::INFINITY
    } else {
        (num / den).ln()
    }
}

/// The region II decay exponent `ε₁`, with `max(λ₁+λ₃, 1)` in the denominator.
pub fn epsilon1(lam: &CouplingTriple) -> Result<f64> {
    lam.require(Region::II)?;
    Ok(log_ratio(lam, (lam.lambda1 + lam.lambda3).max(1.0)))
}

/// Strip half-width `ε₂` (times 2π) on which `c` stays zero-free with zero winding.
pub fn epsilon2(lam: &CouplingTriple) -> Result<f64> {
    lam.require(Region::II)?;
    Ok(log_ratio(lam, lam.lambda1 + lam.lambda3))
}

/// `L̃ = ln((λ₂+√(λ₂²−4λ₁λ₃))/(2λ₂))`.
pub fn l_tilde(lam: &CouplingTriple) -> f64 {
    ((lam.lambda2 + lam.disc().sqrt()) / (2.0 * lam.lambda2)).ln()
}

/// `∫_𝕋 ln|c(x+iε)| dx` by Jensen's formula.
pub fn log_c_mean(lam: &CouplingTriple, eps: f64) -> f64 {
    // c = w⁻¹(a + b w + c₂ w²) with |w| = 1.
    let a = lam.lambda1 * (TAU * eps).exp();
    let b = lam.lambda2;
    let c2 = lam.lambda3 * (-TAU * eps).exp();
    let lnp = |r: f64| r.ln().max(0.0);
    if c2 == 0.0 {
        return b.ln() + lnp(a / b);
    }
    let d = (b * b - 4.0 * a * c2).max(0.0).sqrt();
    c2.ln() + lnp((b + d) / (2.0 * c2)) + lnp((b - d).abs() / (2.0 * c2))
}

/// Values of `c`, `c̃` and the continued square root `|c| = √(c·c̃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolEval {
    pub c: C64,
    pub c_tilde: C64,
    pub abs_c: C64,
}

/// `c(z) = λ₁e^{−2πi(z+α/2)} + λ₂ + λ₃e^{2πi(z+α/2)}`.
#[inline]
pub fn c_symbol(lam: &CouplingTriple, alpha: f64, z: C64) -> C64 {
    let w = (C64::new(0.0, TAU) * (z + alpha / 2.0)).exp();
    lam.lambda1 / w + lam.lambda2 + lam.lambda3 * w
}

/// `c̃(z) = λ₁e^{2πi(z+α/2)} + λ₂ + λ₃e^{−2πi(z+α/2)}`.
#[inline]
pub fn c_tilde_symbol(lam: &CouplingTriple, alpha: f64, z: C64) -> C64 {
    let w = (C64::new(0.0, TAU) * (z + alpha / 2.0)).exp();
    lam.lambda1 * w + lam.lambda2 + lam.lambda3 / w
}

/// Potential `v(z) = 2cos 2πz`.
#[inline]
pub fn potential(z: C64) -> C64 {
    (z * TAU).cos() * 2.0
}

/// `|c|(z)`: the modulus on the real axis, continued along the vertical path
/// from `Re z` elsewhere.
pub fn abs_c(lam: &CouplingTriple, alpha: f64, z: C64) -> Result<C64> {
    let x = z.re;
    let c0 = c_symbol(lam, alpha, C64::new(x, 0.0));
    let m0 = c0.norm();
    if m0 * m0 < 1e-24 {
        return Err(Error::SingularSymbol { re: x, im: 0.0 });
    }
    if z.im == 0.0 {
        return Ok(C64::new(m0, 0.0));
    }
    let w_at = |t: f64| {
        let zt = C64::new(x, t);
        c_symbol(lam, alpha, zt) * c_tilde_symbol(lam, alpha, zt)
    };
    let w_end = w_at(z.im);
    if w_end.norm() < 1e-24 {
        return Err(Error::SingularSymbol { re: z.re, im: z.im });
    }
    // On a path inside the right half-plane the principal root is the continuation.
    if (1..=4).all(|j| w_at(z.im * j as f64 / 4.0).re > 0.0) {
        return Ok(w_end.sqrt());
    }
    let steps = 256;
    let mut s = C64::new(m0, 0.0);
    for j in 1..=steps {
        let w = w_at(z.im * j as f64 / steps as f64);
        if w.norm() < 1e-24 {
            return Err(Error::SingularSymbol { re: z.re, im: z.im * j as f64 / steps as f64 });
        }
        let r = w.sqrt();
        s = if (r - s).norm() <= (r + s).norm() { r } else { -r };
    }
    Ok(s)
}

pub fn eval_symbols(lam: &CouplingTriple, alpha: f64, z: C64) -> Result<SymbolEval> {
    let c = c_symbol(lam, alpha, z);
    let c_tilde = c_tilde_symbol(lam, alpha, z);
    if (c * c_tilde).norm() < 1e-24 {
        return Err(Error::SingularSymbol { re: z.re, im: z.im });
    }
    Ok(SymbolEval { c, c_tilde, abs_c: abs_c(lam, alpha, z)? })
}

/// `(Hu)_n` for `u` supported on `start..start+len`; the result covers one
/// extra site on each side and starts at `start − 1`.
pub fn apply_h(lam: &CouplingTriple, alpha: f64, theta: f64, start: i64, u: &[C64]) -> (i64, Vec<C64>) {
    let len = u.len() as i64;
    let get = |n: i64| -> C64 {
        let i = n - start;
        if i < 0 || i >= len {
            C64::new(0.0, 0.0)
        } else {
            u[i as usize]
        }
    };
    let out = (start - 1..start + len + 1)
        .map(|n| {
            let ph = C64::new(theta + n as f64 * alpha, 0.0);
            let prev = C64::new(theta + (n - 1) as f64 * alpha, 0.0);
            c_symbol(lam, alpha, ph) * get(n + 1)
                + c_tilde_symbol(lam, alpha, prev) * get(n - 1)
                + potential(ph) * get(n)
        })
        .collect();
    (start - 1, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regions() {
        assert_eq!(classify_region(&CouplingTriple::amo(2.0)), Region::II);
        assert_eq!(classify_region(&CouplingTriple::new(0.2, 0.5, 0.1).unwrap()), Region::I);
        assert_eq!(classify_region(&CouplingTriple::new(1.0, 1.0, 1.0).unwrap()), Region::III);
        assert_eq!(classify_region(&CouplingTriple::new(0.5, 1.0, 0.5).unwrap()), Region::Boundary);
    }

    #[test]
    fn dual_example() {
        let d = dual(&CouplingTriple::new(0.1, 2.0, 0.3).unwrap());
        assert!((d.lambda1 - 0.15).abs() < 1e-15);
        assert!((d.lambda2 - 0.5).abs() < 1e-15);
        assert!((d.lambda3 - 0.05).abs() < 1e-15);
    }

    #[test]
    fn epsilon_values() {
        assert!((epsilon1(&CouplingTriple::amo(2.0)).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(epsilon2(&CouplingTriple::amo(2.0)).unwrap(), f64::INFINITY);
        let lam = CouplingTriple::new(0.1, 2.0, 0.3).unwrap();
        assert!((epsilon1(&lam).unwrap() - 0.71703).abs() < 1e-4);
        assert!((epsilon2(&lam).unwrap() - 1.8895).abs() < 1e-3);
        assert!(matches!(epsilon1(&dual(&lam)), Err(Error::WrongRegion { .. })));
    }

    #[test]
    fn abs_c_on_axis_is_modulus() {
        let lam = CouplingTriple::new(0.1, 2.0, 0.3).unwrap();
        let s = eval_symbols(&lam, 0.3, C64::new(0.17, 0.0)).unwrap();
        assert!((s.abs_c.re - s.c.norm()).abs() < 1e-15);
        assert!((s.c_tilde - s.c.conj()).norm() < 1e-15);
    }

    #[test]
    fn abs_c_squares_to_product_off_axis() {
        let lam = CouplingTriple::new(0.1, 2.0, 0.3).unwrap();
        for k in 0..20 {
            let z = C64::new(k as f64 / 20.0, 0.1);
            let s = eval_symbols(&lam, 0.618, z).unwrap();
            assert!((s.abs_c * s.abs_c - s.c * s.c_tilde).norm() < 1e-12);
            assert!(s.abs_c.re > 0.0);
        }
    }

    #[test]
    fn delta_support() {
        let lam = CouplingTriple::new(0.1, 2.0, 0.3).unwrap();
        let (start, out) = apply_h(&lam, 0.618, 0.1, 0, &[C64::new(1.0, 0.0)]);
        assert_eq!(start, -1);
        assert_eq!(out.len(), 3);
        assert!(out.iter().all(|v| v.norm() > 0.0));
    }
}
