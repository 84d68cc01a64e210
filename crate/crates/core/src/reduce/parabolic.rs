//! Reduction to a parabolic constant when `2θ ∈ αℤ + ℤ`, and the first-order
//! trace expansion at a gap edge.

use super::cohomology::{matrix_cohomology, scalar_cohomology, TrigMatrix};
use crate::cocycle::{q_conjugation, transfer, Variant};
use crate::fourier::TrigPoly;
use crate::localize::DualEigenpair;
use crate::model::{CouplingTriple, Region};
use crate::prelude::*;
use crate::stats::fit_line;

/// `M(x)` with first column `V(x)` and second column `(−conj V₂, conj V₁)/‖V‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub m: Vec<CMat2>,
    /// `sup |det M − 1|`.
    pub det_error: f64,
    pub norm_max: f64,
    /// `max(sup ‖V‖, 1/inf ‖V‖)`.
    pub norm_bound: f64,
    pub min_norm: f64,
}

pub fn complete_to_sl2(v: &[[C64; 2]]) -> Result<Completion> {
    let norms: Vec<f64> = v.iter().map(|w| (w[0].norm_sqr() + w[1].norm_sqr()).sqrt()).collect();
    let min_norm = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    if v.is_empty() || !(min_norm > 1e-14) {
        return Err(Error::VectorVanishes(if v.is_empty() { 0.0 } else { min_norm }));
    }
    let m: Vec<CMat2> = v
        .iter()
        .zip(&norms)
        .map(|(w, n)| {
            let s = 1.0 / (n * n);
            CMat2::new(w[0], -w[1].conj() * s, w[1], w[0].conj() * s)
        })
        .collect();
    let max_norm = norms.iter().cloned().fold(0.0, f64::max);
    Ok(Completion {
        det_error: m.iter().map(|a| (a.det() - 1.0).norm()).fold(0.0, nan_max),
        norm_max: m.iter().map(|a| a.norm()).fold(0.0, nan_max),
        norm_bound: max_norm.max(1.0 / min_norm),
        min_norm,
        m,
    })
}

/// Parameters of [`parabolic_reduce`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParabolicConfig {
    /// Phase points per unit length (a power of two).
    pub grid: usize,
    /// Fourier cut-off for the scalar cohomological step.
    pub k_max: usize,
    /// Largest `sup|det(Ũ, conj Ũ)| / sup‖Ũ‖²` accepted as case B.
    pub case_b_tol: f64,
    pub q_modes: usize,
}

impl Default for ParabolicConfig {
    fn default() -> Self {
        ParabolicConfig { grid: 1024, k_max: 200, case_b_tol: 1e-6, q_modes: 128 }
    }
}

/// `M` conjugating the cocycle to `[[d, a], [0, d]]`, `d = ±1`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ParabolicForm {
    pub alpha: f64,
    /// `M(m/grid)`, `m = 0..grid`.
    pub m: Vec<Mat2>,
    pub a: f64,
    pub d: f64,
    /// `[M₁₁²]`, `[M₁₁M₁₂]`, `[M₁₂²]` for `M̃ = M/√|c|(x−α)`, read off `M₁`.
    pub m11sq: f64,
    pub m11m12: f64,
    pub m12sq: f64,
    /// `M₁(x) = M⁻¹(x+α) ∂_E Ã(x) M(x)` on the grid.
    pub m1: Vec<Mat2>,
    /// `sup |M⁻¹(x+α)Ã(x)M(x) − [[d, a], [0, d]]|`.
    pub residual: f64,
    pub cohomology_residual: f64,
    pub case_b_ratio: f64,
    /// Disagreement between the two componentwise ratios `ũ_i / conj ũ_i`.
    pub eta_mismatch: f64,
    /// `sup |Im W| / sup |W|` after the phase is removed.
    pub imag_part: f64,
}

/// Reduces `Ã_{λ,E}` using `U(x) = (e^{2πiθ}u(x), u(x−α))` from a dual eigenvector.
pub fn parabolic_reduce(
    lam: &CouplingTriple,
    alpha: f64,
    energy: f64,
    theta: f64,
    u: &DualEigenpair,
    cfg: &ParabolicConfig,
) -> Result<ParabolicForm> {
    lam.require(Region::II)?;
    let poly = TrigPoly::new(u.start, u.u.clone());
    let first = poly.scale(cis(theta));
    let second = poly.translate(-alpha);
    let q = q_conjugation(lam, alpha, cfg.q_modes)?;
    let at = transfer(lam, alpha, energy, Variant::ATilde)?;
    let dt = transfer(lam, alpha, energy + 1.0, Variant::ATilde)?;
    reduce_invariant_section(
        alpha,
        |x| Ok(at.eval(x)?.re()),
        |x| Ok(dt.eval(x)?.re() - at.eval(x)?.re()),
        |x| {
            let z = C64::new(x, 0.0);
            Ok(q.eval(z)?.apply([first.eval(z), second.eval(z)]))
        },
        cfg,
    )
}

/// Continuous square root of `η` on `ℝ/2ℤ`, tabulated on `m/n`, `m = 0..2n`.
struct SqrtTable {
    n: usize,
    values: Vec<C64>,
}

impl SqrtTable {
    fn build(eta: &[C64], n: usize) -> Result<Self> {
        let mut values = Vec::with_capacity(2 * n + 1);
        let mut s = eta[0].sqrt();
        if s.im < 0.0 || (s.im == 0.0 && s.re < 0.0) {
            s = -s;
        }
        values.push(s);
        for e in &eta[1..] {
            let r = e.sqrt();
            let prev = *values.last().expect("non-empty");
            let next = if (r - prev).norm() <= (r + prev).norm() { r } else { -r };
            if (next - prev).norm() > 0.5 {
                return Err(Error::SquareRootBranch);
            }
            values.push(next);
        }
        if (values[2 * n] - values[0]).norm() > 1e-6 {
            return Err(Error::SquareRootBranch);
        }
        Ok(SqrtTable { n, values })
    }

    fn at(&self, x: f64, eta: C64) -> C64 {
        let t = ((x - 2.0 * (0.5 * x).floor()) * self.n as f64).round() as usize % (2 * self.n);
        let r = eta.sqrt();
        let near = self.values[t];
        if (r - near).norm() <= (r + near).norm() {
            r
        } else {
            -r
        }
    }
}

fn ratio(v: C64) -> C64 {
    v / v.conj()
}

/// Case-B reduction for a cocycle `A` with an invariant section:
/// `A(x)Ũ(x) = e^{2πiθ}Ũ(x+α)` for some `θ` with `2θ ∈ αℤ + ℤ`, where `(Ũ, conj Ũ)` is degenerate.
///
/// `derivative` is `∂_E A`, used for `M₁`.
pub fn reduce_invariant_section(
    alpha: f64,
    cocycle: impl Fn(f64) -> Result<Mat2>,
    derivative: impl Fn(f64) -> Result<Mat2>,
    section: impl Fn(f64) -> Result<[C64; 2]>,
    cfg: &ParabolicConfig,
) -> Result<ParabolicForm> {
    let n = cfg.grid;
    if n < 16 || !n.is_power_of_two() {
        return Err(invalid("grid must be a power of two ≥ 16"));
    }
    let xs: Vec<f64> = (0..=2 * n).map(|m| m as f64 / n as f64).collect();
    let ut: Vec<[C64; 2]> = xs[..=n].iter().map(|&x| section(x)).collect::<Result<_>>()?;

    let size = ut.iter().map(|v| v[0].norm_sqr() + v[1].norm_sqr()).fold(0.0, f64::max);
    let case_b_ratio = ut
        .iter()
        .map(|v| (v[0] * v[1].conj() - v[1] * v[0].conj()).norm())
        .fold(0.0, nan_max)
        / size;
    if !(case_b_ratio <= cfg.case_b_tol) {
        return Err(Error::NotCaseB(case_b_ratio));
    }

    let comp = |v: &[C64; 2]| if v[0].norm() >= v[1].norm() { 0 } else { 1 };
    let mut eta_mismatch: f64 = 0.0;
    for v in &ut {
        if v[0].norm_sqr().min(v[1].norm_sqr()) > 1e-6 * size {
            eta_mismatch = nan_max(eta_mismatch, (ratio(v[0]) - ratio(v[1])).norm());
        }
    }
    if eta_mismatch > 1e-4 {
        return Err(Error::NotCaseB(eta_mismatch));
    }
    let eta_of = |v: &[C64; 2]| ratio(v[comp(v)]);
    let eta: Vec<C64> = (0..=2 * n).map(|m| eta_of(&ut[m % n])).collect();
    let table = SqrtTable::build(&eta, n)?;

    let mut imag: f64 = 0.0;
    let mut wmax: f64 = 0.0;
    let w_at = |x: f64, v: [C64; 2]| -> [f64; 2] {
        let p = table.at(x, eta_of(&v)).conj();
        [(v[0] * p).re, (v[1] * p).re]
    };
    let m_tilde = |w: [f64; 2]| {
        let s = w[0] * w[0] + w[1] * w[1];
        Mat2::new(w[0], -w[1] / s, w[1], w[0] / s)
    };
    for (m, v) in ut.iter().enumerate() {
        let p = table.at(xs[m], eta_of(v)).conj();
        let w = [v[0] * p, v[1] * p];
        imag = imag.max(w[0].im.abs().max(w[1].im.abs()));
        wmax = wmax.max(w[0].re.abs().max(w[1].re.abs()));
    }
    let imag_part = imag / wmax;

    let mut here = Vec::with_capacity(n);
    let mut there = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let mut amat = Vec::with_capacity(n);
    for m in 0..n {
        let x = xs[m];
        let h = m_tilde(w_at(x, ut[m]));
        let t = m_tilde(w_at(x + alpha, section(x + alpha)?));
        let a = cocycle(x)?;
        b.push(t.inv() * a * h);
        here.push(h);
        there.push(t);
        amat.push(a);
    }
    let d = if b.iter().map(|m| m.a).sum::<f64>() >= 0.0 { 1.0 } else { -1.0 };
    let tau = TrigPoly::from_samples(&b.iter().map(|m| C64::new(m.b, 0.0)).collect::<Vec<_>>());
    let a = tau.mean().re;
    let coh = scalar_cohomology(&tau.scale(C64::new(d, 0.0)), alpha, cfg.k_max)?;
    let psi = coh.solution;
    let psi_here = psi.eval_grid(n, 0.0);
    let psi_there = psi.translate(alpha).eval_grid(n, 0.0);

    let m0 = Mat2::new(d, a, 0.0, d);
    let mut residual: f64 = 0.0;
    let mut ms = Vec::with_capacity(n + 1);
    let mut m1 = Vec::with_capacity(n);
    for m in 0..n {
        let mh = here[m] * Mat2::new(1.0, psi_here[m].re, 0.0, 1.0);
        let mt = there[m] * Mat2::new(1.0, psi_there[m].re, 0.0, 1.0);
        let mti = mt.inv();
        residual = nan_max(residual, (mti * amat[m] * mh - m0).max_abs());
        m1.push(mti * derivative(xs[m])? * mh);
        ms.push(mh);
    }
    ms.push(m_tilde(w_at(1.0, section(1.0)?)) * Mat2::new(1.0, psi.eval_real(1.0).re, 0.0, 1.0));

    let mean = |f: &dyn Fn(&Mat2) -> f64| m1.iter().map(f).sum::<f64>() / n as f64;
    let m11sq = -d * mean(&|m| m.c);
    let m11m12 = -d * mean(&|m| m.d);
    let m12sq = d * mean(&|m| m.b) + d * a * m11m12;
    Ok(ParabolicForm {
        alpha,
        m: ms,
        a,
        d,
        m11sq,
        m11m12,
        m12sq,
        m1,
        residual,
        cohomology_residual: coh.residual,
        case_b_ratio,
        eta_mismatch,
        imag_part,
    })
}

/// One row of [`gap_opening_certificate`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TraceRow {
    pub epsilon: f64,
    /// Mean over the grid of `trace Z_ε⁻¹(x+α)(M₀ + εM₁(x))Z_ε(x)`, `Z_ε = e^{εY}`.
    pub trace: f64,
    /// `2d − aε[M₁₁²]`.
    pub predicted: f64,
    pub deviation: f64,
    /// `|predicted| > 2`.
    pub uniformly_hyperbolic: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GapCertificate {
    pub rows: Vec<TraceRow>,
    /// Sign of `ε` on which the gap opens.
    pub open_side: i8,
    /// Slope of `ln deviation` against `ln |ε|`.
    pub exponent: Option<f64>,
    pub cohomology_residual: f64,
}

fn expm(y: CMat2) -> CMat2 {
    let half = y.trace() * 0.5;
    let s = (half * half - y.det()).sqrt();
    let shc = if s.norm() < 1e-4 {
        1.0 + s * s / 6.0 + s * s * s * s / 120.0
    } else {
        s.sinh() / s
    };
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let centred = y - CMat2::new(half, zero, zero, half);
    (CMat2::new(s.cosh(), zero, zero, s.cosh()) + centred.scale(shc)).scale(half.exp() * one)
}

/// Traces of the first-order conjugated perturbation `M_ε` against `2d − aε[M₁₁²]`.
pub fn gap_opening_certificate(pf: &ParabolicForm, epsilons: &[f64], k_max: usize) -> Result<GapCertificate> {
    if pf.m11sq < 1e-10 {
        return Err(Error::DegenerateAverage(pf.m11sq));
    }
    let n = pf.m1.len();
    let d = pf.d;
    let samples: Vec<CMat2> = pf.m1.iter().map(|m| m.to_complex()).collect();
    let m1 = TrigMatrix::from_samples(&samples);
    let sign = C64::new(d, 0.0);
    let rhs = TrigMatrix::new(
        m1.entries[0].scale(sign),
        m1.entries[1].scale(sign),
        m1.entries[2].scale(sign),
        m1.entries[3].scale(sign),
    );
    let coh = matrix_cohomology(d * pf.a, &rhs, pf.alpha, k_max)?;
    let y = coh.solution;
    let y_here = y.eval_grid(n, 0.0);
    let y_there = y.translate(pf.alpha).eval_grid(n, 0.0);
    let m1_grid = m1.eval_grid(n, 0.0);
    let m0 = Mat2::new(d, pf.a, 0.0, d).to_complex();

    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let e = C64::new(eps, 0.0);
        let mut acc = 0.0;
        for m in 0..n {
            let zh = expm(y_here[m].scale(e));
            let zt = expm(y_there[m].scale(e));
            acc += (zt.inv() * (m0 + m1_grid[m].scale(e)) * zh).trace().re;
        }
        let trace = if eps == 0.0 { 2.0 * d } else { acc / n as f64 };
        let predicted = 2.0 * d - pf.a * eps * pf.m11sq;
        rows.push(TraceRow {
            epsilon: eps,
            trace,
            predicted,
            deviation: (trace - predicted).abs(),
            uniformly_hyperbolic: predicted.abs() > 2.0,
        });
    }
    let (lx, ly): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.epsilon != 0.0 && r.deviation > 0.0)
        .map(|r| (r.epsilon.abs().ln(), r.deviation.ln()))
        .unzip();
    let open_side = if -d * pf.a > 0.0 { 1 } else { -1 };
    Ok(GapCertificate {
        rows,
        open_side,
        exponent: fit_line(&lx, &ly).map(|f| f.slope),
        cohomology_residual: coh.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: f64 = 0.618_033_988_749_894_8;

    fn conj_map(x: f64) -> Mat2 {
        let s = (TAU * x).sin();
        let c = (TAU * x).cos();
        Mat2::new(1.0, 0.3 * s, 0.0, 1.0) * Mat2::new(1.0, 0.0, 0.2 * c + 0.1 * s, 1.0)
    }

    #[test]
    fn synthetic_parabolic_recovers_a() {
        let a = 0.37;
        let m0 = Mat2::new(1.0, a, 0.0, 1.0);
        let b = move |x: f64| Ok(conj_map(x + GOLDEN) * m0 * conj_map(x).inv());
        let db = move |x: f64| Ok(conj_map(x + GOLDEN) * Mat2::new(1.0, 0.0, 0.0, 0.0) * conj_map(x).inv());
        let phase = C64::from_polar(1.0, 0.7);
        let section = move |x: f64| {
            let p = conj_map(x);
            Ok([phase * p.a, phase * p.c])
        };
        let pf = reduce_invariant_section(GOLDEN, b, db, section, &ParabolicConfig::default()).unwrap();
        assert!((pf.a - a).abs() < 1e-6, "a = {}", pf.a);
        assert_eq!(pf.d, 1.0);
        assert!(pf.residual < 1e-8);
    }

    #[test]
    fn unit_vector_completes_to_identity() {
        let v = vec![[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]; 4];
        let c = complete_to_sl2(&v).unwrap();
        for m in &c.m {
            assert!((*m - CMat2::diag(C64::new(1.0, 0.0), C64::new(1.0, 0.0))).max_abs() < 1e-15);
        }
    }

    #[test]
    fn vanishing_vector_is_rejected() {
        let v = vec![[C64::new(0.0, 0.0), C64::new(0.0, 0.0)]];
        assert!(matches!(complete_to_sl2(&v), Err(Error::VectorVanishes(_))));
    }

    #[test]
    fn plug_in_trace() {
        let pf = ParabolicForm {
            alpha: GOLDEN,
            m: vec![],
            a: 1.0,
            d: 1.0,
            m11sq: 1.0,
            m11m12: 0.0,
            m12sq: 0.0,
            m1: vec![Mat2::new(-1.0, 0.0, -1.0, 0.0); 64],
            residual: 0.0,
            cohomology_residual: 0.0,
            case_b_ratio: 0.0,
            eta_mismatch: 0.0,
            imag_part: 0.0,
        };
        let c = gap_opening_certificate(&pf, &[0.0, -1e-3], 8).unwrap();
        assert_eq!(c.rows[0].trace, 2.0);
        assert!((c.rows[1].trace - 2.001).abs() < 1e-12);
        assert!(c.rows[1].uniformly_hyperbolic);
        assert_eq!(c.open_side, -1);
    }

    #[test]
    fn degenerate_average() {
        let pf = ParabolicForm {
            alpha: GOLDEN,
            m: vec![],
            a: 1.0,
            d: 1.0,
            m11sq: 0.0,
            m11m12: 0.0,
            m12sq: 0.0,
            m1: vec![],
            residual: 0.0,
            cohomology_residual: 0.0,
            case_b_ratio: 0.0,
            eta_mismatch: 0.0,
            imag_part: 0.0,
        };
        assert!(matches!(gap_opening_certificate(&pf, &[1e-3], 8), Err(Error::DegenerateAverage(_))));
    }
}
