use crate::linalg::solve_tridiagonal;
use crate::model::{c_symbol, c_tilde_symbol, det_p, potential, CouplingTriple};
use crate::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum GreenMethod {
    /// Determinant ratios `P_j` times products of `c`.
    Cramer,
    DenseInverse,
}

/// Entries of `G_I = (E − H_I)^{-1}` linking `y` with the ends of `I = [x1, x2]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GreenEval {
    pub interval: (i64, i64),
    pub y: i64,
    /// `G_I(x1, y)`
    pub first_y: C64,
    /// `G_I(y, x2)`
    pub y_last: C64,
    /// `G_I(y, x1)`
    pub y_first: C64,
    /// `G_I(x2, y)`
    pub last_y: C64,
    pub method: GreenMethod,
}

fn at(theta: f64, alpha: f64, n: i64) -> C64 {
    C64::new(theta + n as f64 * alpha, 0.0)
}

/// `(ln|Π c_j|, phase)` over `j ∈ [a, b)`, using `sym` for the entries.
fn product(
    lam: &CouplingTriple,
    alpha: f64,
    theta: f64,
    a: i64,
    b: i64,
    sym: fn(&CouplingTriple, f64, C64) -> C64,
) -> (f64, C64) {
    let mut ln = 0.0;
    let mut phase = C64::new(1.0, 0.0);
    for j in a..b {
        let c = sym(lam, alpha, at(theta, alpha, j));
        ln += c.norm().ln();
        phase *= c / c.norm();
    }
    (ln, phase)
}

/// `|P_k/P_k'|` on `[x1, x2]`: within a factor `k` of `dist(E, σ(H_I))` near a root.
fn newton_distance(lam: &CouplingTriple, alpha: f64, theta: f64, e: f64, x1: i64, x2: i64) -> f64 {
    // r_j = P_j/P_{j−1} and its E-derivative; ln P_k = Σ ln r_j.
    let (mut r, mut dr) = (1.0f64, 0.0f64);
    let mut t = 0.0;
    for j in x1..=x2 {
        let v = potential(at(theta, alpha, j)).re;
        let (nr, ndr) = if j == x1 {
            (e - v, 1.0)
        } else {
            let b = c_symbol(lam, alpha, at(theta, alpha, j - 1)).norm_sqr();
            let r0 = if r == 0.0 { 1e-300 } else { r };
            ((e - v) - b / r0, 1.0 + b * dr / (r0 * r0))
        };
        r = nr;
        dr = ndr;
        t += dr / if r == 0.0 { 1e-300 } else { r };
    }
    1.0 / t.abs()
}

fn cramer(lam: &CouplingTriple, alpha: f64, theta: f64, e: f64, (x1, x2): (i64, i64), y: i64) -> Result<GreenEval> {
    let k = (x2 - x1 + 1) as usize;
    let whole = det_p(lam, alpha, theta + x1 as f64 * alpha, e, k);
    let ln_det = whole.ln_abs(k);
    let dist = newton_distance(lam, alpha, theta, e, x1, x2);
    if dist < 1e-12 * (1.0 + e.abs()) {
        return Err(Error::NearSingular(dist));
    }
    let right = det_p(lam, alpha, theta + (y + 1) as f64 * alpha, e, (x2 - y) as usize);
    let (ln_r, s_r) = (right.ln_abs((x2 - y) as usize), right.sign((x2 - y) as usize));
    let (ln_l, s_l) = (whole.ln_abs((y - x1) as usize), whole.sign((y - x1) as usize));
    let s_det = whole.sign(k);
    let entry = |(ln_c, ph): (f64, C64), ln_p: f64, s: f64| ph * (s * s_det * (ln_c + ln_p - ln_det).exp());
    Ok(GreenEval {
        interval: (x1, x2),
        y,
        first_y: entry(product(lam, alpha, theta, x1, y, c_symbol), ln_r, s_r),
        y_first: entry(product(lam, alpha, theta, x1, y, c_tilde_symbol), ln_r, s_r),
        y_last: entry(product(lam, alpha, theta, y, x2, c_symbol), ln_l, s_l),
        last_y: entry(product(lam, alpha, theta, y, x2, c_tilde_symbol), ln_l, s_l),
        method: GreenMethod::Cramer,
    })
}

fn dense(lam: &CouplingTriple, alpha: f64, theta: f64, e: f64, (x1, x2): (i64, i64), y: i64) -> Result<GreenEval> {
    let k = (x2 - x1 + 1) as usize;
    let diag: Vec<C64> = (x1..=x2).map(|j| C64::new(e - potential(at(theta, alpha, j)).re, 0.0)).collect();
    let upper: Vec<C64> = (x1..x2).map(|j| -c_symbol(lam, alpha, at(theta, alpha, j))).collect();
    let lower: Vec<C64> = (x1..x2).map(|j| -c_tilde_symbol(lam, alpha, at(theta, alpha, j))).collect();
    let column = |c: usize| {
        let mut rhs = vec![C64::new(0.0, 0.0); k];
        rhs[c] = C64::new(1.0, 0.0);
        solve_tridiagonal(&lower, &diag, &upper, &rhs)
    };
    let (iy, il) = ((y - x1) as usize, k - 1);
    let col_y = column(iy);
    let col_first = column(0);
    let col_last = column(il);
    let out = GreenEval {
        interval: (x1, x2),
        y,
        first_y: col_y[0],
        last_y: col_y[il],
        y_first: col_first[iy],
        y_last: col_last[iy],
        method: GreenMethod::DenseInverse,
    };
    if [out.first_y, out.last_y, out.y_first, out.y_last].iter().any(|v| !v.is_finite()) {
        return Err(Error::NearSingular(0.0));
    }
    Ok(out)
}

/// Green's function entries of the section on `interval` at energy `e`.
pub fn green(
    lam: &CouplingTriple,
    alpha: f64,
    theta: f64,
    e: f64,
    interval: (i64, i64),
    y: i64,
    method: GreenMethod,
) -> Result<GreenEval> {
    let (x1, x2) = interval;
    if x2 < x1 || y < x1 || y > x2 {
        return Err(invalid("need x1 ≤ y ≤ x2"));
    }
    match method {
        GreenMethod::Cramer => cramer(lam, alpha, theta, e, interval, y),
        GreenMethod::DenseInverse => dense(lam, alpha, theta, e, interval, y),
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Regularity {
    pub regular: bool,
    /// An interval certifying regularity, when one exists.
    pub witness: Option<(i64, i64)>,
    /// Largest over admissible intervals of `min_i (−m|y−x_i| − ln|G_I(y, x_i)|)`.
    pub best_margin: f64,
}

/// Whether `y` is `(k, m)`-regular: some `I = [x1, x1+k−1] ∋ y` with both ends at
/// distance `≥ k/3` from `y` and `|G_I(y, x_i)| ≤ e^{−m|y−x_i|}`.
pub fn regularity(lam: &CouplingTriple, alpha: f64, theta: f64, e: f64, y: i64, k: usize, m: f64) -> Result<Regularity> {
    if k < 3 {
        return Err(invalid("k must be at least 3"));
    }
    if !(m > 0.0) {
        return Err(invalid("m must be positive"));
    }
    let k = k as i64;
    let third = k as f64 / 3.0;
    let mut best = Regularity { regular: false, witness: None, best_margin: f64::NEG_INFINITY };
    let mut singular = None;
    let mut tried = 0;
    for x1 in (y - k + 1)..=y {
        let x2 = x1 + k - 1;
        if ((y - x1) as f64) < third || ((x2 - y) as f64) < third {
            continue;
        }
        tried += 1;
        // A near-singular interval has a huge resolvent and cannot be a witness.
        let g = match green(lam, alpha, theta, e, (x1, x2), y, GreenMethod::Cramer) {
            Err(err @ Error::NearSingular(_)) => {
                singular = Some(err);
                continue;
            }
            other => other?,
        };
        let m1 = -m * (y - x1) as f64 - g.y_first.norm().ln();
        let m2 = -m * (x2 - y) as f64 - g.y_last.norm().ln();
        let margin = m1.min(m2);
        if margin > best.best_margin {
            best.best_margin = margin;
            if margin >= 0.0 {
                best.regular = true;
                best.witness = Some((x1, x2));
            }
        }
    }
    match singular {
        Some(err) if best.best_margin == f64::NEG_INFINITY && tried > 0 => Err(err),
        _ => Ok(best),
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Uniformity {
    pub uniform: bool,
    /// `ln` of the largest Lagrange-basis modulus on `[−1, 1]`.
    pub ln_max: f64,
    /// `kγ`
    pub ln_bound: f64,
    pub argmax: f64,
}

fn ln_basis_max(nodes: &[f64], denoms: &[f64], x: f64) -> f64 {
    let ln_all: Vec<f64> = nodes.iter().map(|c| (x - c).abs().ln()).collect();
    let total: f64 = ln_all.iter().sum();
    (0..nodes.len()).map(|i| total - ln_all[i] - denoms[i]).fold(f64::NEG_INFINITY, f64::max)
}

/// Golden-section maximisation of `f` on `[a, b]`.
fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-13 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (f(x), x)
}

/// Whether `{θ_1..θ_{k+1}}` is `γ`-uniform: every Lagrange basis polynomial in the
/// nodes `cos 2πθ_j` stays below `e^{kγ}` on `[−1, 1]`.
///
/// The maximum is taken on an `x_grid_size` grid (endpoints included), then
/// refined by golden-section search around the three best grid points.
pub fn uniformity(theta_set: &[f64], gamma: f64, x_grid_size: usize) -> Result<Uniformity> {
    if theta_set.len() < 2 || x_grid_size < 2 {
        return Err(invalid("need at least two nodes and two grid points"));
    }
    let nodes: Vec<f64> = theta_set.iter().map(|t| (TAU * t).cos()).collect();
    let mut denoms = Vec::with_capacity(nodes.len());
    for (i, ci) in nodes.iter().enumerate() {
        let mut s = 0.0;
        for (j, cj) in nodes.iter().enumerate() {
            if i != j {
                let d = (ci - cj).abs();
                if d < 1e-12 {
                    return Err(Error::DegenerateNodes);
                }
                s += d.ln();
            }
        }
        denoms.push(s);
    }
    let f = |x: f64| ln_basis_max(&nodes, &denoms, x);
    let h = 2.0 / (x_grid_size - 1) as f64;
    let mut grid: Vec<(f64, f64)> = (0..x_grid_size)
        .map(|m| {
            let x = -1.0 + h * m as f64;
            (f(x), x)
        })
        .collect();
    grid.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = grid[0];
    for &(_, x) in grid.iter().take(3) {
        let cand = golden_max(&f, (x - h).max(-1.0), (x + h).min(1.0));
        if cand.0 > best.0 {
            best = cand;
        }
    }
    let ln_bound = (theta_set.len() - 1) as f64 * gamma;
    Ok(Uniformity { uniform: best.0 < ln_bound, ln_max: best.0, ln_bound, argmax: best.1 })
}
