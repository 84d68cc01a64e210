//! Finite sections `H_{[a, a+k−1]}(θ)`, the determinant recurrence and the
//! Sturm-bisection eigensolver.

use super::{c_symbol, potential, CouplingTriple};
use crate::linalg::{solve_tridiagonal, solve_tridiagonal_real};
use crate::prelude::*;

const ZERO_PIVOT: f64 = 1e-300;
const BISECTION_CAP: usize = 200;

/// `P_0..P_k` stored as `values[j]·e^{log_scale[j]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PSequence {
    pub values: Vec<f64>,
    pub log_scale: Vec<f64>,
}

impl PSequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `P_j` in plain `f64` (may overflow to ±∞ for long sections).
    pub fn get(&self, j: usize) -> f64 {
        self.values[j] * self.log_scale[j].exp()
    }

    pub fn ln_abs(&self, j: usize) -> f64 {
        self.values[j].abs().ln() + self.log_scale[j]
    }

    pub fn sign(&self, j: usize) -> f64 {
        self.values[j].signum()
    }
}

/// `P_j(θ) = det(E − H_{[0,j−1]}(θ))` for `j = 0..=k`.
pub fn det_p(lam: &CouplingTriple, alpha: f64, theta: f64, energy: f64, k: usize) -> PSequence {
    let mut values = Vec::with_capacity(k + 1);
    let mut log_scale = Vec::with_capacity(k + 1);
    values.push(1.0);
    log_scale.push(0.0);
    if k == 0 {
        return PSequence { values, log_scale };
    }
    let mut prev = 1.0;
    let mut cur = energy - potential(C64::new(theta, 0.0)).re;
    let mut scale = 0.0;
    values.push(cur);
    log_scale.push(0.0);
    for j in 2..=k {
        let v = potential(C64::new(theta + (j - 1) as f64 * alpha, 0.0)).re;
        let b = c_symbol(lam, alpha, C64::new(theta + (j - 2) as f64 * alpha, 0.0)).norm_sqr();
        let next = (energy - v) * cur - b * prev;
        prev = cur;
        cur = next;
        if cur.abs() > 1e150 {
            let s = cur.abs();
            cur /= s;
            prev /= s;
            scale += s.ln();
        }
        values.push(cur);
        log_scale.push(scale);
    }
    PSequence { values, log_scale }
}

/// The Hermitian tridiagonal matrix on sites `start..start+size`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSection {
    pub theta: f64,
    pub start: i64,
    /// `v_n = 2cos2π(θ+nα)`.
    pub diagonal: Vec<f64>,
    /// `c(θ+nα)` at `(n, n+1)`; the `(n+1, n)` entry is its conjugate.
    pub off_diagonal: Vec<C64>,
    off_sq: Vec<f64>,
    hull: (f64, f64),
}

/// What [`finite_section_eigs`] computes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SectionMode {
    CountBelow(f64),
    AllValues,
    Pairs,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SectionEigs {
    Count(usize),
    Values(Vec<f64>),
    Pairs(Vec<(f64, Vec<C64>)>),
}

pub fn finite_section_eigs(
    lam: &CouplingTriple,
    alpha: f64,
    theta: f64,
    k: usize,
    mode: SectionMode,
) -> Result<SectionEigs> {
    let h = FiniteSection::new(lam, alpha, theta, 0, k)?;
    Ok(match mode {
        SectionMode::CountBelow(e) => SectionEigs::Count(h.count_below(e)),
        SectionMode::AllValues => SectionEigs::Values(h.eigenvalues()?),
        SectionMode::Pairs => SectionEigs::Pairs(h.eigenpairs()?),
    })
}

impl FiniteSection {
    pub fn new(lam: &CouplingTriple, alpha: f64, theta: f64, start: i64, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(invalid("section size must be at least 1"));
        }
        let diagonal = (0..size)
            .map(|i| potential(C64::new(theta + (start + i as i64) as f64 * alpha, 0.0)).re)
            .collect();
        let off_diagonal: Vec<C64> = (0..size - 1)
            .map(|i| c_symbol(lam, alpha, C64::new(theta + (start + i as i64) as f64 * alpha, 0.0)))
            .collect();
        let off_sq = off_diagonal.iter().map(|c| c.norm_sqr()).collect();
        Ok(FiniteSection { theta, start, diagonal, off_diagonal, off_sq, hull: lam.gershgorin() })
    }

    pub fn size(&self) -> usize {
        self.diagonal.len()
    }

    pub fn hull(&self) -> (f64, f64) {
        self.hull
    }

    /// Number of eigenvalues strictly below `e` (positive pivots of `e − H`).
    pub fn count_below(&self, e: f64) -> usize {
        let mut r = e - self.diagonal[0];
        let mut count = (r > 0.0) as usize;
        for i in 1..self.diagonal.len() {
            if r == 0.0 {
                r = ZERO_PIVOT;
            }
            r = (e - self.diagonal[i]) - self.off_sq[i - 1] / r;
            count += (r > 0.0) as usize;
        }
        count
    }

    /// All eigenvalues in increasing order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.eigenvalues_between(self.hull.0, self.hull.1, 1e-13)
    }

    /// All eigenvalues by implicit QL on the real gauge-equivalent matrix.
    pub fn eigenvalues_ql(&self) -> Result<Vec<f64>> {
        let mut d = self.diagonal.clone();
        let mut e: Vec<f64> = self.off_sq.iter().map(|x| x.sqrt()).collect();
        e.push(0.0);
        tql(&mut d, &mut e)?;
        d.sort_by(f64::total_cmp);
        Ok(d)
    }

    /// Eigenvalues in `[lo, hi)` to absolute tolerance `tol`.
    pub fn eigenvalues_between(&self, lo: f64, hi: f64, tol: f64) -> Result<Vec<f64>> {
        let n_lo = self.count_below(lo);
        let n_hi = self.count_below(hi);
        let mut out = vec![0.0; n_hi - n_lo];
        let mut stack = vec![(lo, hi, n_lo, n_hi, 0usize)];
        while let Some((a, b, na, nb, depth)) = stack.pop() {
            if na == nb {
                continue;
            }
            if b - a <= tol * (1.0 + a.abs().max(b.abs())) {
                let mid = 0.5 * (a + b);
                for v in &mut out[na - n_lo..nb - n_lo] {
                    *v = mid;
                }
                continue;
            }
            if depth > BISECTION_CAP {
                return Err(Error::ConvergenceFailure("bisection exceeded its iteration cap"));
            }
            let mid = 0.5 * (a + b);
            let nm = self.count_below(mid);
            stack.push((mid, b, nm, nb, depth + 1));
            stack.push((a, mid, na, nm, depth + 1));
        }
        Ok(out)
    }

    /// The eigenvalue closest to `target`.
    pub fn nearest_eigenvalue(&self, target: f64) -> Result<f64> {
        let n = self.count_below(target);
        let mut best: Option<f64> = None;
        let (lo, hi) = self.hull;
        // The neighbours are the n-th (below) and (n+1)-th (above) eigenvalues.
        if n > 0 {
            best = Some(self.kth_eigenvalue(n - 1, lo, target)?);
        }
        if n < self.size() {
            let above = self.kth_eigenvalue(n, target, hi)?;
            best = match best {
                Some(b) if (target - b).abs() <= (above - target).abs() => Some(b),
                _ => Some(above),
            };
        }
        best.ok_or(Error::ConvergenceFailure("empty section"))
    }

    /// The `k`-th eigenvalue (0-based), known to lie in `[lo, hi]`.
    fn kth_eigenvalue(&self, k: usize, mut lo: f64, mut hi: f64) -> Result<f64> {
        for _ in 0..BISECTION_CAP {
            if hi - lo <= 1e-14 * (1.0 + lo.abs().max(hi.abs())) {
                return Ok(0.5 * (lo + hi));
            }
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::ConvergenceFailure("bisection exceeded its iteration cap"))
    }

    /// `H u` restricted to the section.
    pub fn apply(&self, u: &[C64]) -> Vec<C64> {
        let n = self.size();
        (0..n)
            .map(|i| {
                let mut acc = u[i] * self.diagonal[i];
                if i + 1 < n {
                    acc += self.off_diagonal[i] * u[i + 1];
                }
                if i > 0 {
                    acc += self.off_diagonal[i - 1].conj() * u[i - 1];
                }
                acc
            })
            .collect()
    }

    /// Unit eigenvector for the eigenvalue `e` by inverse iteration.
    pub fn eigenvector(&self, e: f64) -> Result<Vec<C64>> {
        let n = self.size();
        let lower: Vec<C64> = self.off_diagonal.iter().map(|c| c.conj()).collect();
        let diag: Vec<C64> = self.diagonal.iter().map(|d| C64::new(d - e, 0.0)).collect();
        // A fixed, non-symmetric start keeps the result deterministic.
        let mut x: Vec<C64> = (0..n).map(|i| C64::new(1.0 + 0.37 * ((i * 7919) % 97) as f64 / 97.0, 0.0)).collect();
        let scale = 1.0 + e.abs();
        for iter in 0..8 {
            x = solve_tridiagonal(&lower, &diag, &self.off_diagonal, &x);
            let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::ConvergenceFailure("inverse iteration broke down"));
            }
            for v in &mut x {
                *v /= norm;
            }
            if iter >= 1 {
                let hx = self.apply(&x);
                let res = hx.iter().zip(&x).map(|(h, v)| (h - v * e).norm_sqr()).sum::<f64>().sqrt();
                if res <= 1e-10 * scale {
                    return Ok(x);
                }
            }
        }
        let hx = self.apply(&x);
        let res = hx.iter().zip(&x).map(|(h, v)| (h - v * e).norm_sqr()).sum::<f64>().sqrt();
        if res <= 1e-8 * scale {
            Ok(x)
        } else {
            Err(Error::ConvergenceFailure("inverse iteration residual above 1e-8"))
        }
    }

    /// `|u_n|²` of the unit eigenvector for `e`, computed on the real gauge-equivalent matrix.
    pub fn eigenvector_weights(&self, e: f64) -> Result<Vec<f64>> {
        let n = self.size();
        let off: Vec<f64> = self.off_sq.iter().map(|x| x.sqrt()).collect();
        let diag: Vec<f64> = self.diagonal.iter().map(|d| d - e).collect();
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.37 * ((i * 7919) % 97) as f64 / 97.0).collect();
        let scale = 1.0 + e.abs();
        let mut res = f64::INFINITY;
        for _ in 0..8 {
            x = solve_tridiagonal_real(&off, &diag, &off, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::ConvergenceFailure("inverse iteration broke down"));
            }
            x.iter_mut().for_each(|v| *v /= norm);
            res = (0..n)
                .map(|i| {
                    let mut r = diag[i] * x[i];
                    if i + 1 < n {
                        r += off[i] * x[i + 1];
                    }
                    if i > 0 {
                        r += off[i - 1] * x[i - 1];
                    }
                    r * r
                })
                .sum::<f64>()
                .sqrt();
            if res <= 1e-10 * scale {
                break;
            }
        }
        if res > 1e-8 * scale {
            return Err(Error::ConvergenceFailure("inverse iteration residual above 1e-8"));
        }
        Ok(x.into_iter().map(|v| v * v).collect())
    }

    pub fn eigenpairs(&self) -> Result<Vec<(f64, Vec<C64>)>> {
        self.eigenvalues()?
            .into_iter()
            .map(|e| self.eigenvector(e).map(|v| (e, v)))
            .collect()
    }
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// `e[i]` at `(i, i+1)`; `d` is overwritten, `e` destroyed.
fn tql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::ConvergenceFailure("QL iteration did not converge"));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_outside_hull() {
        let lam = CouplingTriple::new(0.1, 2.0, 0.3).unwrap();
        let h = FiniteSection::new(&lam, 0.618, 0.2, 0, 50).unwrap();
        let (lo, hi) = lam.gershgorin();
        assert_eq!(h.count_below(lo - 1e-9), 0);
        assert_eq!(h.count_below(hi + 1e-9), 50);
    }

    #[test]
    fn p1_and_p2() {
        let lam = CouplingTriple::new(0.1, 2.0, 0.3).unwrap();
        let (alpha, theta, e) = (0.618, 0.11, 0.7);
        let p = det_p(&lam, alpha, theta, e, 2);
        let v0 = potential(C64::new(theta, 0.0)).re;
        let v1 = potential(C64::new(theta + alpha, 0.0)).re;
        let c0 = c_symbol(&lam, alpha, C64::new(theta, 0.0)).norm_sqr();
        assert!((p.get(1) - (e - v0)).abs() < 1e-14);
        assert!((p.get(2) - ((e - v0) * (e - v1) - c0)).abs() < 1e-13);
    }

    #[test]
    fn eigenvalue_count_matches_size() {
        let lam = CouplingTriple::amo(2.0);
        let h = FiniteSection::new(&lam, 0.618, 0.0, -10, 21).unwrap();
        let ev = h.eigenvalues().unwrap();
        assert_eq!(ev.len(), 21);
        assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        let (e, v) = (ev[10], h.eigenvector(ev[10]).unwrap());
        let hv = h.apply(&v);
        let res: f64 = hv.iter().zip(&v).map(|(a, b)| (a - b * e).norm_sqr()).sum::<f64>().sqrt();
        assert!(res < 1e-8);
    }

    #[test]
    fn ql_matches_bisection() {
        let lam = CouplingTriple::new(0.1, 2.0, 0.3).unwrap();
        let h = FiniteSection::new(&lam, 0.618, 0.3, -5, 300).unwrap();
        let a = h.eigenvalues().unwrap();
        let b = h.eigenvalues_ql().unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-11, "{x} {y}");
        }
    }
}
