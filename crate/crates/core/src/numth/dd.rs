//! Double-double arithmetic (about 106 bits of mantissa).

use crate::prelude::*;
use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[allow(clippy::should_implement_trait)]
impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }

    pub fn neg(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    pub fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }

    pub fn mul_f64(self, x: f64) -> Self {
        self.mul(DoubleDouble::from_f64(x))
    }

    pub fn floor(self) -> Self {
        let f = self.hi.floor();
        if f == self.hi {
            let (hi, lo) = quick_two_sum(f, self.lo.floor());
            DoubleDouble { hi, lo }
        } else {
            DoubleDouble { hi: f, lo: 0.0 }
        }
    }

    /// Fractional part in `[0, 1)`, rounded to `f64`.
    pub fn frac(self) -> f64 {
        let f = self.sub(self.floor()).to_f64();
        if f >= 1.0 {
            0.0
        } else if f < 0.0 {
            f + 1.0
        } else {
            f
        }
    }

    /// Nearest double-double to `p/q`.
    pub fn from_ratio(p: &BigUint, q: &BigUint) -> Self {
        let shift = 120u32 + q.bits().saturating_sub(p.bits()) as u32;
        let m: BigUint = (p << shift as usize) / q;
        let hi_m = big_to_f64(&m);
        let hi_int = f64_to_bigint(hi_m);
        let rem = BigInt::from(m) - hi_int;
        let lo_m = bigint_to_f64(&rem);
        let scale = (-(shift as f64)).exp2();
        let (hi, lo) = quick_two_sum(hi_m * scale, lo_m * scale);
        DoubleDouble { hi, lo }
    }

    /// Exact value as a rational `num/2^exp`.
    pub fn to_dyadic(self) -> (BigInt, u32) {
        let (m1, e1) = dyadic(self.hi);
        let (m2, e2) = dyadic(self.lo);
        let e = e1.min(e2).min(0);
        let shift1 = (e1 - e) as usize;
        let shift2 = (e2 - e) as usize;
        ((m1 << shift1) + (m2 << shift2), (-e) as u32)
    }

    /// Parses a plain or scientific decimal string exactly, then rounds.
    pub fn parse_decimal(s: &str) -> Option<Self> {
        let s = s.trim();
        let (mant, exp) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
            None => (s, 0),
        };
        let (neg, mant) = match mant.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mant.strip_prefix('+').unwrap_or(mant)),
        };
        let (int_part, frac_part) = match mant.find('.') {
            Some(i) => (&mant[..i], &mant[i + 1..]),
            None => (mant, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        let digits: String = [int_part, frac_part].concat();
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let num = BigUint::parse_bytes(digits.as_bytes(), 10).unwrap_or_else(BigUint::zero);
        let e = exp - frac_part.len() as i32;
        let ten = BigUint::from(10u32);
        let (p, q) = if e >= 0 {
            (num * num_traits::pow(ten, e as usize), BigUint::one())
        } else {
            (num, num_traits::pow(ten, (-e) as usize))
        };
        if p.is_zero() {
            return Some(DoubleDouble::ZERO);
        }
        let v = DoubleDouble::from_ratio(&p, &q);
        Some(if neg { v.neg() } else { v })
    }
}

fn dyadic(x: f64) -> (BigInt, i32) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let (m, e, sign) = x.integer_decode();
    let m = BigInt::from(m);
    (if sign < 0 { -m } else { m }, e as i32)
}

fn f64_to_bigint(x: f64) -> BigInt {
    let (m, e) = dyadic(x);
    if e >= 0 {
        m << e as usize
    } else {
        m >> (-e) as usize
    }
}

/// `f64` approximation of a big integer of any size.
pub fn big_to_f64(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_u64().unwrap_or(0) as f64;
    }
    let shift = bits - 64;
    let top = (x >> shift as usize).to_u64().unwrap_or(0) as f64;
    top * (shift as f64).exp2()
}

fn bigint_to_f64(x: &BigInt) -> f64 {
    let v = big_to_f64(x.magnitude());
    if x.sign() == Sign::Minus {
        -v
    } else {
        v
    }
}

/// Natural log of a positive big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap_or(0) as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift as usize).to_u64().unwrap_or(0) as f64;
    top.ln() + shift as f64 * core::f64::consts::LN_2
}
