//! Quasi-periodic `SL(2)`-type cocycles over the rotation `x ↦ x + α`.

mod conjugation;
mod rotation;

pub use conjugation::{q_conjugation, QConjugation};
pub use rotation::{degree, rotation_number, uh_probe, UhProbe, UhVerdict};

use crate::model::{eval_symbols, potential, CouplingTriple, Region, SymbolEval};
use crate::prelude::*;
use crate::stats::{mean_stderr, phase_samples, KahanSum};

/// Which transfer matrix to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Variant {
    /// `A = (1/c(θ))[[E−v(θ), −c̃(θ−α)], [c(θ), 0]]`.
    A,
    /// `Ã = (|c|(θ)|c|(θ−α))^{−1/2}[[E−v(θ), −|c|(θ−α)], [|c|(θ), 0]]`.
    ATilde,
    /// `D = c·A`.
    D,
}

type MatFn = dyn Fn(C64) -> Result<CMat2> + Send + Sync;

enum Kind {
    Transfer { lam: CouplingTriple, energy: f64, variant: Variant },
    Constant(CMat2),
    Map(Box<MatFn>),
}

/// A cocycle `(α, A)`, possibly evaluated on the horizontal line `Im z = ε`.
pub struct CocycleMap {
    alpha: f64,
    offset: f64,
    strip_radius: f64,
    homotopic: bool,
    kind: Kind,
}

impl core::fmt::Debug for CocycleMap {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("CocycleMap")
            .field("alpha", &self.alpha)
            .field("offset", &self.offset)
            .field("strip_radius", &self.strip_radius)
            .field("homotopic_to_identity", &self.homotopic)
            .finish_non_exhaustive()
    }
}

/// Builds a transfer-matrix cocycle.
pub fn transfer(lam: &CouplingTriple, alpha: f64, energy: f64, variant: Variant) -> Result<CocycleMap> {
    let strip_radius = match (variant, lam.region()) {
        (Variant::ATilde, Region::II) => crate::model::epsilon1(lam)? / TAU,
        (Variant::ATilde, Region::I) => crate::model::epsilon1(&lam.dual())? / TAU,
        (Variant::ATilde, r) => {
            return Err(Error::WrongRegion { expected: "I or II", found: r.as_str() });
        }
        _ => f64::INFINITY,
    };
    let real = lam.lambda1 == 0.0 && lam.lambda3 == 0.0;
    Ok(CocycleMap {
        alpha,
        offset: 0.0,
        strip_radius,
        homotopic: variant == Variant::ATilde || real,
        kind: Kind::Transfer { lam: *lam, energy, variant },
    })
}

impl CocycleMap {
    /// The constant cocycle `x ↦ m`.
    pub fn constant(alpha: f64, m: CMat2) -> Self {
        let homotopic = m.max_imag() == 0.0 && m.det().re > 0.0;
        CocycleMap { alpha, offset: 0.0, strip_radius: f64::INFINITY, homotopic, kind: Kind::Constant(m) }
    }

    /// A cocycle given by an arbitrary evaluator on complex phases.
    pub fn from_fn(
        alpha: f64,
        homotopic_to_identity: bool,
        f: impl Fn(C64) -> Result<CMat2> + Send + Sync + 'static,
    ) -> Self {
        CocycleMap {
            alpha,
            offset: 0.0,
            strip_radius: f64::INFINITY,
            homotopic: homotopic_to_identity,
            kind: Kind::Map(Box::new(f)),
        }
    }

    /// The complexified cocycle `x ↦ A(x + iε)`.
    pub fn complexified(mut self, eps: f64) -> Result<Self> {
        if eps.abs() > self.strip_radius * (1.0 + 1e-12) {
            return Err(invalid(format!(
                "strip height {eps} exceeds the supported radius {}",
                self.strip_radius
            )));
        }
        self.offset = eps;
        if eps != 0.0 {
            self.homotopic = false;
        }
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn strip_radius(&self) -> f64 {
        self.strip_radius
    }

    pub fn homotopic_to_identity(&self) -> bool {
        self.homotopic
    }

    fn symbols(&self, x: f64) -> Result<Option<SymbolEval>> {
        match &self.kind {
            Kind::Transfer { lam, .. } => eval_symbols(lam, self.alpha, C64::new(x, self.offset)).map(Some),
            _ => Ok(None),
        }
    }

    fn assemble(&self, x: f64, cur: Option<&SymbolEval>, prev: Option<&SymbolEval>) -> Result<CMat2> {
        match &self.kind {
            Kind::Constant(m) => Ok(*m),
            Kind::Map(f) => f(C64::new(x, self.offset)),
            Kind::Transfer { energy, variant, .. } => {
                let (cur, prev) = (cur.expect("symbols"), prev.expect("symbols"));
                let ev = C64::new(*energy, 0.0) - potential(C64::new(x, self.offset));
                let zero = C64::new(0.0, 0.0);
                Ok(match variant {
                    Variant::D => CMat2::new(ev, -prev.c_tilde, cur.c, zero),
                    Variant::A => CMat2::new(ev, -prev.c_tilde, cur.c, zero).scale(cur.c.inv()),
                    Variant::ATilde => {
                        let s = (cur.abs_c * prev.abs_c).sqrt().inv();
                        CMat2::new(ev, -prev.abs_c, cur.abs_c, zero).scale(s)
                    }
                })
            }
        }
    }

    /// `A(x + iε)`.
    pub fn eval(&self, x: f64) -> Result<CMat2> {
        let cur = self.symbols(x)?;
        let prev = self.symbols(x - self.alpha)?;
        self.assemble(x, cur.as_ref(), prev.as_ref())
    }

    /// Calls `visit(k, A(x + kα))` for `k = 0..n`, reusing symbol values
    /// along the orbit.
    pub fn for_orbit(&self, x: f64, n: usize, mut visit: impl FnMut(usize, CMat2) -> Result<()>) -> Result<()> {
        let mut prev = self.symbols(x - self.alpha)?;
        for k in 0..n {
            let xk = x + k as f64 * self.alpha;
            let cur = self.symbols(xk)?;
            let m = self.assemble(xk, cur.as_ref(), prev.as_ref())?;
            visit(k, m)?;
            prev = cur;
        }
        Ok(())
    }
}

/// `A_n(x)` kept as `mat · e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMatrix {
    pub mat: CMat2,
    pub log_scale: f64,
}

impl ScaledMatrix {
    pub fn ln_norm(&self) -> f64 {
        self.mat.norm().ln() + self.log_scale
    }
}

/// `A_n(x) = A(x+(n−1)α)⋯A(x)`, and `A_{−n}(x) = A_n(x−nα)^{−1}`, with a
/// running rescale.
pub fn iterate_scaled(c: &CocycleMap, x: f64, n: i64) -> Result<ScaledMatrix> {
    let mut m = CMat2::IDENTITY;
    let mut log_scale = KahanSum::default();
    let steps = n.unsigned_abs() as usize;
    let start = if n >= 0 { x } else { x - steps as f64 * c.alpha };
    c.for_orbit(start, steps, |k, a| {
        m = if n >= 0 { a * m } else { m * a.inv() };
        if (k + 1) % 32 == 0 {
            let s = m.max_abs();
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Overflow);
            }
            m = m.scale_re(1.0 / s);
            log_scale.add(s.ln());
        }
        Ok(())
    })?;
    Ok(ScaledMatrix { mat: m, log_scale: log_scale.value() })
}

/// `A_n(x)` as a plain matrix.
pub fn iterate(c: &CocycleMap, x: f64, n: i64) -> Result<CMat2> {
    let s = iterate_scaled(c, x, n)?;
    let m = s.mat.scale_re(s.log_scale.exp());
    if m.max_abs().is_finite() {
        Ok(m)
    } else {
        Err(Error::Overflow)
    }
}

/// Lyapunov estimate with its standard error across starting phases.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LyapunovEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub per_phase: Vec<f64>,
}

/// Average of `(1/n) ln‖A_n(x_j)‖` over `n_phases` equidistributed phases.
pub fn lyapunov(c: &CocycleMap, n_iter: usize, n_phases: usize, seed: u64) -> Result<LyapunovEstimate> {
    lyapunov_with(c, n_iter, n_phases, seed, true)
}

/// As [`lyapunov`], optionally without renormalisation (then entries may overflow).
pub fn lyapunov_with(
    c: &CocycleMap,
    n_iter: usize,
    n_phases: usize,
    seed: u64,
    renormalize: bool,
) -> Result<LyapunovEstimate> {
    if n_iter < 1000 {
        return Err(invalid("lyapunov needs at least 1000 iterations"));
    }
    if n_phases == 0 {
        return Err(invalid("need at least one phase"));
    }
    let mut per_phase = Vec::with_capacity(n_phases);
    for x in phase_samples(n_phases, seed) {
        let mut m = CMat2::IDENTITY;
        let mut logs = KahanSum::default();
        c.for_orbit(x, n_iter, |k, a| {
            m = a * m;
            if renormalize && (k + 1) % 32 == 0 {
                let s = m.max_abs();
                if !(s.is_finite() && s > 0.0) {
                    return Err(Error::Overflow);
                }
                m = m.scale_re(1.0 / s);
                logs.add(s.ln());
            }
            Ok(())
        })?;
        let norm = m.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Overflow);
        }
        logs.add(norm.ln());
        per_phase.push(logs.value() / n_iter as f64);
    }
    let (estimate, stderr) = mean_stderr(&per_phase);
    Ok(LyapunovEstimate { estimate, stderr, per_phase })
}
