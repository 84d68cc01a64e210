//! FFT and finitely supported Fourier series.
//!
//! A [`TrigPoly`] is `Σ_k c_k e^{2πi(k+s)z}` over an integer window of `k`,
//! with a fixed frequency offset `s` (half-integer offsets describe functions
//! on `ℝ/2ℤ`). Evaluation works at complex phases `z = x + iε`.

use crate::prelude::*;

/// In-place discrete Fourier transform.
///
/// Forward: `X_k = Σ_m x_m e^{−2πikm/n}`. Inverse uses `+` and is not
/// normalised. Power-of-two lengths use radix-2; other lengths fall back to
/// the direct sum.
pub fn fft(buf: &mut [C64], inverse: bool) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    if !n.is_power_of_two() {
        let src = buf.to_vec();
        for (k, out) in buf.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (m, v) in src.iter().enumerate() {
                acc += v * cis(sign * ((k * m) % n) as f64 / n as f64);
            }
            *out = acc;
        }
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let twiddles: Vec<C64> = (0..half).map(|j| cis(sign * j as f64 / len as f64)).collect();
        for start in (0..n).step_by(len) {
            for j in 0..half {
                let u = buf[start + j];
                let v = buf[start + j + half] * twiddles[j];
                buf[start + j] = u + v;
                buf[start + j + half] = u - v;
            }
        }
        len <<= 1;
    }
}

/// Scalar trigonometric polynomial `Σ_{k=lo}^{lo+len−1} c_k e^{2πi(k+shift)z}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    pub lo: i64,
    pub coeffs: Vec<C64>,
    pub shift: f64,
}

impl TrigPoly {
    pub fn new(lo: i64, coeffs: Vec<C64>) -> Self {
        TrigPoly { lo, coeffs, shift: 0.0 }
    }

    pub fn zero() -> Self {
        TrigPoly::new(0, vec![C64::new(0.0, 0.0)])
    }

    pub fn constant(c: C64) -> Self {
        TrigPoly::new(0, vec![c])
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }

    /// Largest frequency index in the window.
    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    /// Coefficient at integer index `k` (zero outside the window).
    pub fn coeff(&self, k: i64) -> C64 {
        let i = k - self.lo;
        if i < 0 || i >= self.coeffs.len() as i64 {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[i as usize]
        }
    }

    /// Mean over the torus; zero when the frequency offset is not an integer.
    pub fn mean(&self) -> C64 {
        if self.shift != 0.0 {
            return C64::new(0.0, 0.0);
        }
        self.coeff(0)
    }

    /// Direct summation at a complex phase.
    pub fn eval(&self, z: C64) -> C64 {
        let w = (C64::new(0.0, TAU) * z).exp();
        let mut p = (C64::new(0.0, TAU * (self.lo as f64 + self.shift)) * z).exp();
        let mut acc = C64::new(0.0, 0.0);
        for c in &self.coeffs {
            acc += c * p;
            p *= w;
        }
        acc
    }

    pub fn eval_real(&self, x: f64) -> C64 {
        self.eval(C64::new(x, 0.0))
    }

    /// Values at `x_m = m/n + iε`, `m = 0..n`, via an FFT after folding the
    /// window modulo `n`.
    pub fn eval_grid(&self, n: usize, eps: f64) -> Vec<C64> {
        let mut buf = vec![C64::new(0.0, 0.0); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            let k = self.lo + j as i64;
            let damp = (-TAU * k as f64 * eps).exp();
            buf[k.rem_euclid(n as i64) as usize] += c * damp;
        }
        fft(&mut buf, true);
        if self.shift != 0.0 {
            let damp = (-TAU * self.shift * eps).exp();
            for (m, v) in buf.iter_mut().enumerate() {
                *v *= cis(self.shift * m as f64 / n as f64) * damp;
            }
        }
        buf
    }

    /// Fourier coefficients `k ∈ [−n/2, n/2)` of samples on the uniform grid `m/n`.
    pub fn from_samples(samples: &[C64]) -> Self {
        let n = samples.len();
        let mut buf = samples.to_vec();
        fft(&mut buf, false);
        let half = (n / 2) as i64;
        let lo = -half;
        let coeffs = (0..n as i64)
            .map(|i| buf[(lo + i).rem_euclid(n as i64) as usize] / n as f64)
            .collect();
        TrigPoly::new(lo, coeffs)
    }

    /// Samples `f(m/n)` with `n` rounded up to a power of two, then transforms.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> C64) -> Self {
        let n = n.next_power_of_two();
        let samples: Vec<C64> = (0..n).map(|m| f(m as f64 / n as f64)).collect();
        Self::from_samples(&samples)
    }

    /// Zeroes coefficients below `rel·max|c_k|`, so that round-off in sampled
    /// data is not amplified when evaluating off the real axis.
    pub fn denoise(mut self, rel: f64) -> Self {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for c in &mut self.coeffs {
            if c.norm() <= rel * max {
                *c = C64::new(0.0, 0.0);
            }
        }
        self
    }

    /// Coefficients of `z ↦ f(z + t)`.
    pub fn translate(&self, t: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * cis((self.lo as f64 + j as f64 + self.shift) * t))
            .collect();
        TrigPoly { lo: self.lo, coeffs, shift: self.shift }
    }

    /// Keeps only `|k| ≤ kmax`.
    pub fn truncate(&self, kmax: i64) -> Self {
        let lo = self.lo.max(-kmax);
        let hi = self.hi().min(kmax);
        if hi < lo {
            return TrigPoly::zero().with_shift(self.shift);
        }
        TrigPoly { lo, coeffs: (lo..=hi).map(|k| self.coeff(k)).collect(), shift: self.shift }
    }

    pub fn scale(&self, s: C64) -> Self {
        TrigPoly { lo: self.lo, coeffs: self.coeffs.iter().map(|c| c * s).collect(), shift: self.shift }
    }

    /// Sum of two series with the same frequency offset.
    pub fn add(&self, other: &TrigPoly) -> Self {
        debug_assert!((self.shift - other.shift).abs() < 1e-15);
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        TrigPoly {
            lo,
            coeffs: (lo..=hi).map(|k| self.coeff(k) + other.coeff(k)).collect(),
            shift: self.shift,
        }
    }

    pub fn sub(&self, other: &TrigPoly) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Product by direct convolution; offsets add.
    pub fn mul(&self, other: &TrigPoly) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        TrigPoly { lo: self.lo + other.lo, coeffs, shift: self.shift + other.shift }
    }

    /// `Σ |c_k|` over indices outside `keep`.
    pub fn mass_outside(&self, keep: &[i64]) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(j, _)| !keep.contains(&(self.lo + *j as i64)))
            .map(|(_, c)| c.norm())
            .sum()
    }

    /// Length of the smallest integer interval containing the support, minus one.
    pub fn essential_degree(&self, tol: f64) -> usize {
        let nz: Vec<usize> = (0..self.coeffs.len()).filter(|&j| self.coeffs[j].norm() > tol).collect();
        match (nz.first(), nz.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }
}

/// Two-component trigonometric polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigVector {
    pub comps: [TrigPoly; 2],
}

impl TrigVector {
    pub fn new(first: TrigPoly, second: TrigPoly) -> Self {
        TrigVector { comps: [first, second] }
    }

    pub fn eval(&self, z: C64) -> [C64; 2] {
        [self.comps[0].eval(z), self.comps[1].eval(z)]
    }

    pub fn eval_real(&self, x: f64) -> [C64; 2] {
        self.eval(C64::new(x, 0.0))
    }

    pub fn eval_grid(&self, n: usize, eps: f64) -> Vec<[C64; 2]> {
        let a = self.comps[0].eval_grid(n, eps);
        let b = self.comps[1].eval_grid(n, eps);
        a.into_iter().zip(b).map(|(p, q)| [p, q]).collect()
    }

    pub fn mass_outside(&self, keep: &[i64]) -> f64 {
        self.comps[0].mass_outside(keep) + self.comps[1].mass_outside(keep)
    }
}
