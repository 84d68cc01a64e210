//! 2×2 matrices and a tridiagonal solver.

use crate::prelude::*;
use core::ops::{Add, Mul, Neg, Sub};

pub type C64 = num_complex::Complex64;

/// Real 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Complex 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CMat2 {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    /// Rotation by `t` turns.
    pub fn rotation(t: f64) -> Self {
        let (s, c) = (TAU * t).sin_cos();
        Mat2::new(c, -s, s, c)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn inv(&self) -> Mat2 {
        let det = self.det();
        Mat2::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    /// Operator 2-norm.
    pub fn norm(&self) -> f64 {
        let s = self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d;
        let det = self.det();
        let disc = (s * s - 4.0 * det * det).max(0.0);
        ((s + disc.sqrt()) / 2.0).sqrt()
    }

    pub fn to_complex(&self) -> CMat2 {
        CMat2::new(self.a.into(), self.b.into(), self.c.into(), self.d.into())
    }
}

impl CMat2 {
    pub const IDENTITY: CMat2 = CMat2 {
        a: C64::new(1.0, 0.0),
        b: C64::new(0.0, 0.0),
        c: C64::new(0.0, 0.0),
        d: C64::new(1.0, 0.0),
    };

    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        CMat2 { a, b, c, d }
    }

    pub fn diag(p: C64, q: C64) -> Self {
        CMat2::new(p, C64::new(0.0, 0.0), C64::new(0.0, 0.0), q)
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    pub fn inv(&self) -> CMat2 {
        let r = self.det().inv();
        CMat2::new(self.d * r, -self.b * r, -self.c * r, self.a * r)
    }

    pub fn scale(&self, s: C64) -> CMat2 {
        CMat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn scale_re(&self, s: f64) -> CMat2 {
        CMat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub fn max_abs(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm()).max(self.d.norm())
    }

    /// Operator 2-norm, from the singular values of a 2×2 matrix.
    pub fn norm(&self) -> f64 {
        let s = self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr();
        let det = self.det().norm();
        let disc = (s * s - 4.0 * det * det).max(0.0);
        ((s + disc.sqrt()) / 2.0).sqrt()
    }

    /// Largest imaginary part of any entry.
    pub fn max_imag(&self) -> f64 {
        self.a.im.abs().max(self.b.im.abs()).max(self.c.im.abs()).max(self.d.im.abs())
    }

    pub fn re(&self) -> Mat2 {
        Mat2::new(self.a.re, self.b.re, self.c.re, self.d.re)
    }
}

macro_rules! impl_ops {
    ($t:ty) => {
        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                <$t>::new(
                    self.a * o.a + self.b * o.c,
                    self.a * o.b + self.b * o.d,
                    self.c * o.a + self.d * o.c,
                    self.c * o.b + self.d * o.d,
                )
            }
        }
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                <$t>::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                <$t>::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                <$t>::new(-self.a, -self.b, -self.c, -self.d)
            }
        }
    };
}

impl_ops!(Mat2);
impl_ops!(CMat2);

/// Solves `(diag(d) + sub/sup) x = rhs` for a complex tridiagonal system
/// using Gaussian elimination with partial pivoting.
///
/// `lower[i]` sits at `(i+1, i)` and `upper[i]` at `(i, i+1)`. Exactly zero
/// pivots are replaced by `ε_mach` times the largest entry, so that inverse
/// iteration can run at an exact eigenvalue without overflowing.
pub fn solve_tridiagonal(lower: &[C64], diag: &[C64], upper: &[C64], rhs: &[C64]) -> Vec<C64> {
    let scale = [lower, diag, upper].iter().flat_map(|v| v.iter()).map(|z| z.norm()).fold(f64::MIN_POSITIVE, f64::max);
    solve_tri(lower, diag, upper, rhs, |z| z.norm(), C64::new(f64::EPSILON * scale, 0.0))
}

/// Real counterpart of [`solve_tridiagonal`].
pub fn solve_tridiagonal_real(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let scale = [lower, diag, upper].iter().flat_map(|v| v.iter()).map(|x| x.abs()).fold(f64::MIN_POSITIVE, f64::max);
    solve_tri(lower, diag, upper, rhs, f64::abs, f64::EPSILON * scale)
}

fn solve_tri<T>(lower: &[T], diag: &[T], upper: &[T], rhs: &[T], abs: fn(T) -> f64, tiny: T) -> Vec<T>
where
    T: Copy + num_traits::Zero + core::ops::Sub<Output = T> + core::ops::Mul<Output = T> + core::ops::Div<Output = T>,
{
    let n = diag.len();
    assert!(lower.len() + 1 == n.max(1) && upper.len() + 1 == n.max(1) && rhs.len() == n);
    if n == 0 {
        return Vec::new();
    }
    // Row i after pivoting holds entries at columns i, i+1, i+2.
    let mut r0: Vec<T> = diag.to_vec();
    let mut r1: Vec<T> = vec![T::zero(); n];
    let mut r2: Vec<T> = vec![T::zero(); n];
    let mut b = rhs.to_vec();
    let m = n.saturating_sub(1);
    r1[..m].copy_from_slice(&upper[..m]);
    // Pending next row: (sub at column i, diag at i+1, upper at i+2).
    for i in 0..n {
        if i + 1 < n {
            let mut s = lower[i];
            let mut nd = r0[i + 1];
            let mut nu = if i + 1 < n - 1 { upper[i + 1] } else { T::zero() };
            let mut nb = b[i + 1];
            if abs(s) > abs(r0[i]) {
                core::mem::swap(&mut s, &mut r0[i]);
                core::mem::swap(&mut nd, &mut r1[i]);
                core::mem::swap(&mut nu, &mut r2[i]);
                core::mem::swap(&mut nb, &mut b[i]);
            }
            if abs(r0[i]) == 0.0 {
                r0[i] = tiny;
            }
            let m = s / r0[i];
            r0[i + 1] = nd - m * r1[i];
            r1[i + 1] = nu - m * r2[i];
            b[i + 1] = nb - m * b[i];
        } else if abs(r0[i]) == 0.0 {
            r0[i] = tiny;
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        if i + 1 < n {
            acc = acc - r1[i] * x[i + 1];
        }
        if i + 2 < n {
            acc = acc - r2[i] * x[i + 2];
        }
        x[i] = acc / r0[i];
    }
    x
}
