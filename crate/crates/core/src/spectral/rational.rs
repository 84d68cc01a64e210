use num_integer::Integer;

use crate::model::{c_symbol, potential, CouplingTriple, FiniteSection};
use crate::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum SpectrumMethod {
    Discriminant,
    FiniteSection,
}

/// A finite union of closed intervals.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SpectrumApprox {
    pub intervals: Vec<(f64, f64)>,
    pub method: SpectrumMethod,
    /// Number of bands found for each sampled phase.
    pub bands_per_theta: Vec<usize>,
}

impl SpectrumApprox {
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, e: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= e && e <= b)
    }

    /// Distance from `e` to the set.
    pub fn distance(&self, e: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| if e < a { a - e } else if e > b { e - b } else { 0.0 })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn from_intervals(mut intervals: Vec<(f64, f64)>, method: SpectrumMethod) -> Self {
        let bands_per_theta = Vec::new();
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        SpectrumApprox { intervals: merge(intervals), method, bands_per_theta }
    }
}

fn merge(sorted: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for (a, b) in sorted {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Trace of the one-period transfer matrix of the `q`-periodic Jacobi matrix.
struct Discriminant {
    v: Vec<f64>,
    b: Vec<f64>,
}

impl Discriminant {
    fn new(lam: &CouplingTriple, alpha: f64, theta: f64, q: usize) -> Result<Self> {
        let mut v = Vec::with_capacity(q);
        let mut b = Vec::with_capacity(q);
        for n in 0..q {
            let x = theta + n as f64 * alpha;
            let c = c_symbol(lam, alpha, C64::new(x, 0.0)).norm();
            if c * c < 1e-24 {
                return Err(Error::SingularSymbol { re: x, im: 0.0 });
            }
            v.push(potential(C64::new(x, 0.0)).re);
            b.push(c);
        }
        Ok(Discriminant { v, b })
    }

    fn eval(&self, e: f64) -> f64 {
        let q = self.v.len();
        // Columns of the running product, applied to (u_0, u_{-1}).
        let (mut x0, mut x1) = (1.0, 0.0);
        let (mut y0, mut y1) = (0.0, 1.0);
        for n in 0..q {
            let bn = self.b[n];
            let bp = self.b[(n + q - 1) % q];
            let nx = ((e - self.v[n]) * x0 - bp * x1) / bn;
            let ny = ((e - self.v[n]) * y0 - bp * y1) / bn;
            x1 = x0;
            x0 = nx;
            y1 = y0;
            y0 = ny;
        }
        x0 + y1
    }
}

/// Last point of `[lo, hi]` where `pred` holds, given it holds at `lo` and fails at `hi`.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, pred: impl Fn(f64) -> bool) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn bands_at(lam: &CouplingTriple, p: u64, q: u64, theta: f64, tol: f64) -> Result<Vec<(f64, f64)>> {
    let alpha = p as f64 / q as f64;
    let q = q as usize;
    let disc = Discriminant::new(lam, alpha, theta, q)?;
    let (h0, h1) = lam.gershgorin();
    let mut nodes = vec![h0 - 1.0];
    if q > 1 {
        nodes.extend(FiniteSection::new(lam, alpha, theta, 1, q - 1)?.eigenvalues()?);
    }
    nodes.push(h1 + 1.0);
    let mut bands = Vec::with_capacity(q);
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (da, db) = (disc.eval(a), disc.eval(b));
        // Δ crosses from one side of [−2, 2] to the other exactly once here.
        let s = if da.abs() >= db.abs() { da.signum() } else { -db.signum() };
        let outside_start = |e: f64| s * disc.eval(e) >= 2.0;
        let inside_or_before = |e: f64| s * disc.eval(e) >= -2.0;
        let lo = bisect(a, b, tol, outside_start);
        let hi = bisect(a, b, tol, inside_or_before);
        if hi >= lo {
            bands.push((lo, hi));
        }
    }
    Ok(bands)
}

/// Bands `{E : |Δ(θ, E)| ≤ 2}` of the periodic operator at `α = p/q`, united over `theta_grid`.
pub fn spectrum_rational(
    lam: &CouplingTriple,
    p: u64,
    q: u64,
    theta_grid: &[f64],
    e_resolution: f64,
) -> Result<SpectrumApprox> {
    if q == 0 || p.gcd(&q) != 1 {
        return Err(invalid("p/q must be a reduced fraction"));
    }
    if !(e_resolution > 0.0) {
        return Err(invalid("e_resolution must be positive"));
    }
    let mut all = Vec::new();
    let mut bands_per_theta = Vec::with_capacity(theta_grid.len());
    for &theta in theta_grid {
        let b = bands_at(lam, p, q, theta, e_resolution)?;
        bands_per_theta.push(b.len());
        all.extend(b);
    }
    let mut out = SpectrumApprox::from_intervals(all, SpectrumMethod::Discriminant);
    out.bands_per_theta = bands_per_theta;
    Ok(out)
}
