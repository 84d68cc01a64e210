#![allow(unused_imports)]

pub(crate) use crate::error::{invalid, Error, Result};
pub(crate) use crate::linalg::{CMat2, Mat2, C64};
pub(crate) use alloc::boxed::Box;
pub(crate) use alloc::format;
pub(crate) use alloc::string::{String, ToString};
pub(crate) use alloc::vec;
pub(crate) use alloc::vec::Vec;
pub(crate) use core::f64::consts::PI;
pub(crate) use num_traits::Float;

pub(crate) const TAU: f64 = 2.0 * PI;

/// `e^{2πi t}`.
#[inline]
pub(crate) fn cis(t: f64) -> C64 {
    let (s, c) = (TAU * t).sin_cos();
    C64::new(c, s)
}

/// Fractional part in `[0, 1)`.
#[inline]
pub(crate) fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// `max` that propagates NaN, for residual bookkeeping.
#[inline]
pub(crate) fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}
