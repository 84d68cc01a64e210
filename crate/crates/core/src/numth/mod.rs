//! Continued fractions, the torus metric and resonances.

mod dd;

pub use dd::{big_to_f64, ln_big, DoubleDouble};

use crate::prelude::*;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Distance to the nearest integer.
pub fn torus_norm(x: f64) -> f64 {
    let f = frac(x);
    f.min(1.0 - f)
}

/// An irrational frequency with its continued fraction data.
///
/// Convergents are indexed from `n = 0`: `p_0/q_0 = 0/1`, `p_1/q_1 = 1/a_1`, …
#[derive(Debug, Clone, PartialEq)]
pub struct Irrational {
    value: DoubleDouble,
    partial_quotients: Vec<u64>,
    p: Vec<BigUint>,
    q: Vec<BigUint>,
    name: Option<&'static str>,
}

impl Irrational {
    /// Builds the frequency `[0; a_1, a_2, …]` from its partial quotients.
    pub fn from_partial_quotients(pq: &[u64]) -> Result<Self> {
        if pq.len() < 3 {
            return Err(Error::InsufficientDepth { depth: pq.len(), needed: 3 });
        }
        if pq.contains(&0) {
            return Err(invalid("partial quotients must be positive"));
        }
        let mut p = vec![BigUint::zero(), BigUint::one()];
        let mut q = vec![BigUint::one(), BigUint::from(pq[0])];
        for &a in &pq[1..] {
            let n = p.len();
            p.push(&p[n - 1] * a + &p[n - 2]);
            q.push(&q[n - 1] * a + &q[n - 2]);
        }
        let value = DoubleDouble::from_ratio(p.last().unwrap(), q.last().unwrap());
        Ok(Irrational { value, partial_quotients: pq.to_vec(), p, q, name: None })
    }

    /// `(√5 − 1)/2`, all partial quotients equal to 1.
    pub fn golden() -> Self {
        let mut a = Self::from_partial_quotients(&[1; 120]).expect("static data");
        a.name = Some("golden");
        a
    }

    /// `√2 − 1`, all partial quotients equal to 2.
    pub fn silver() -> Self {
        let mut a = Self::from_partial_quotients(&[2; 100]).expect("static data");
        a.name = Some("silver");
        a
    }

    /// Parses `golden`, `silver`, or a decimal string read at extended precision.
    pub fn parse(spec: &str, max_depth: usize) -> Result<Self> {
        match spec.trim() {
            "golden" => Ok(Self::golden()),
            "silver" => Ok(Self::silver()),
            s => {
                let v = DoubleDouble::parse_decimal(s).ok_or_else(|| invalid(format!("cannot parse frequency `{s}`")))?;
                // A decimal literal is exact, so its precision is set by its digit count.
                let digits = s.bytes().filter(|b| b.is_ascii_digit()).count() as i32;
                let tol = 10f64.powi(-(digits - 1).clamp(1, 31));
                cf_expand_with_tol(v, max_depth, tol.max(1e-31))
            }
        }
    }

    pub fn name(&self) -> Option<&'static str> {
        self.name
    }

    pub fn value(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn value_dd(&self) -> DoubleDouble {
        self.value
    }

    pub fn depth(&self) -> usize {
        self.partial_quotients.len()
    }

    /// `a_1, …, a_D`.
    pub fn partial_quotients(&self) -> &[u64] {
        &self.partial_quotients
    }

    pub fn p(&self, n: usize) -> &BigUint {
        &self.p[n]
    }

    pub fn q(&self, n: usize) -> &BigUint {
        &self.q[n]
    }

    pub fn q_u64(&self, n: usize) -> Option<u64> {
        self.q.get(n).and_then(|q| q.to_u64())
    }

    /// Denominators as `f64`, `n = 0..=D`.
    pub fn denominators_f64(&self) -> Vec<f64> {
        self.q.iter().map(big_to_f64).collect()
    }

    /// `{kα}` computed in double-double.
    pub fn frac_mul(&self, k: i64) -> f64 {
        self.value.mul_f64(k as f64).frac()
    }

    /// `‖x − kα‖` with the subtraction done in double-double.
    pub fn dist(&self, x: f64, k: i64) -> f64 {
        let f = DoubleDouble::from_f64(x).sub(self.value.mul_f64(k as f64)).frac();
        f.min(1.0 - f)
    }

    /// Largest `n` with `q_n ≤ bound`.
    pub fn index_below(&self, bound: u64) -> Option<usize> {
        (0..self.q.len()).rev().find(|&n| self.q_u64(n).is_some_and(|q| q <= bound))
    }
}

/// Continued fraction of an `f64`, stopping once a convergent matches it to
/// double precision.
pub fn cf_expand(alpha: f64, max_depth: usize) -> Result<Irrational> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("frequency must lie in (0, 1)"));
    }
    cf_expand_with_tol(DoubleDouble::from_f64(alpha), max_depth, 2.0 * f64::EPSILON * alpha)
}

/// Continued fraction of a double-double value, to relative-ish tolerance `tol`.
pub fn cf_expand_dd(alpha: DoubleDouble, max_depth: usize) -> Result<Irrational> {
    cf_expand_with_tol(alpha, max_depth, 1e-30 * alpha.to_f64())
}

fn cf_expand_with_tol(alpha: DoubleDouble, max_depth: usize, tol: f64) -> Result<Irrational> {
    let a = alpha.to_f64();
    if !(a > 0.0 && a < 1.0) {
        return Err(invalid("frequency must lie in (0, 1)"));
    }
    let (num, exp) = alpha.to_dyadic();
    let num = num.to_biguint().ok_or_else(|| invalid("negative frequency"))?;
    let den = BigUint::one() << exp as usize;
    // Euclid on num/den; the first quotient is 0.
    let (mut x, mut y) = (den.clone(), num.clone());
    let mut pq = Vec::new();
    let (mut p0, mut p1) = (BigUint::one(), BigUint::zero());
    let (mut q0, mut q1) = (BigUint::zero(), BigUint::one());
    while pq.len() < max_depth && !y.is_zero() {
        let (quot, rem) = x.div_rem(&y);
        let quot_u = quot.to_u64().ok_or(Error::RationalInput { depth: pq.len() })?;
        pq.push(quot_u);
        let p2 = &quot * &p1 + &p0;
        let q2 = &quot * &q1 + &q0;
        p0 = core::mem::replace(&mut p1, p2);
        q0 = core::mem::replace(&mut q1, q2);
        x = core::mem::replace(&mut y, rem);
        // |α − p/q| = |num·q − den·p| / (den·q)
        let diff: BigInt = BigInt::from(&num * &q1) - BigInt::from(&den * &p1);
        let err = big_to_f64(diff.abs().magnitude()) / (big_to_f64(&den) * big_to_f64(&q1));
        if err <= tol {
            break;
        }
    }
    if pq.len() < 3 {
        return Err(Error::RationalInput { depth: pq.len() });
    }
    Irrational::from_partial_quotients(&pq).map(|mut irr| {
        irr.value = alpha;
        irr
    })
}

/// Windowed surrogate for `β(α) = limsup ln(q_{n+1})/q_n`: the max over
/// `n_min ≤ n < D`.
pub fn beta_estimate(a: &Irrational, n_min: usize) -> Result<f64> {
    if a.depth() < 3 {
        return Err(Error::InsufficientDepth { depth: a.depth(), needed: 3 });
    }
    let mut best = 0.0f64;
    for n in n_min..a.depth() {
        let ratio = ln_big(a.q(n + 1)) / big_to_f64(a.q(n));
        best = best.max(ratio);
    }
    Ok(best)
}

/// Smallest `‖kα‖ e^{ξ|k|}` over `1 ≤ k ≤ k_max`: a fitted Diophantine constant.
pub fn diophantine_constant(a: &Irrational, xi: f64, k_max: i64) -> f64 {
    (1..=k_max).map(|k| a.dist(0.0, k) * (xi * k as f64).exp()).fold(f64::INFINITY, f64::min)
}

/// One `ε₀`-resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Resonance {
    pub n: i64,
    /// `‖2θ − nα‖`
    pub dist: f64,
}

/// Resonances of a phase, in order of increasing `|n|`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ResonanceList {
    pub theta: f64,
    pub epsilon0: f64,
    pub k_max: i64,
    pub entries: Vec<Resonance>,
}

impl ResonanceList {
    /// Whether every step between nonzero resonances grows by more than 250×.
    pub fn sparse_growth(&self) -> bool {
        self.entries
            .windows(2)
            .filter(|w| w[0].n != 0)
            .all(|w| w[1].n.abs() > 250 * w[0].n.abs())
    }

    /// The admission bound `e^{−ε₀|n|}`.
    pub fn bound(&self, n: i64) -> f64 {
        (-self.epsilon0 * n.abs() as f64).exp()
    }

    /// `|n_{j+1}|`, or `None` past the last resonance found.
    pub fn next_after(&self, j: usize) -> Option<i64> {
        self.entries.get(j + 1).map(|r| r.n.abs())
    }
}

/// Exhaustive scan of `|k| ≤ k_max` for `ε₀`-resonances of `θ`.
pub fn resonances(theta: f64, a: &Irrational, epsilon0: f64, k_max: i64) -> Result<ResonanceList> {
    if epsilon0 <= 0.0 || k_max < 1 {
        return Err(invalid("need epsilon0 > 0 and k_max ≥ 1"));
    }
    let x = 2.0 * theta;
    let d0 = a.dist(x, 0);
    let mut best = d0;
    let mut entries = vec![Resonance { n: 0, dist: d0 }];
    for m in 1..=k_max {
        let dp = a.dist(x, m);
        let dm = a.dist(x, -m);
        let (k, d) = if dp <= dm { (m, dp) } else { (-m, dm) };
        if d <= best {
            best = d;
            if d <= (-epsilon0 * m as f64).exp() {
                entries.push(Resonance { n: k, dist: d });
            }
        }
    }
    Ok(ResonanceList { theta, epsilon0, k_max, entries })
}
