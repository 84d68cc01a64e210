use crate::cli::Command;
use crate::config::RunConfig;
use crate::report::Table;
use crate::svg::{Plot, Series};
use crate::CliError;
use ehm_core::cocycle::{lyapunov, rotation_number, transfer, Variant};
use ehm_core::localize::{centered_dual_eigenpair, constant_audit, decay_profile, AuditMode, AuditParams};
use ehm_core::model::{classify_region, epsilon1, FiniteSection};
use ehm_core::numth::resonances;
use ehm_core::reduce::{almost_reduce, gap_opening_certificate, parabolic_reduce, ArConfig, ParabolicConfig};
use ehm_core::spectral::{
    detect_gaps, duality_check, gap_table, ids_counting, ids_from_rotation, ids_rotation, linspace, martini_probe,
    spectrum_rational, GapScan, GapTable, IDSCurve,
};
use ehm_core::{CouplingTriple, Irrational};
use serde_json::{json, Value};
use std::collections::BTreeMap;

/// What a command produced, before emission.
pub struct Output {
    pub summary: String,
    pub result: Value,
    pub fitted: BTreeMap<String, f64>,
    pub table: Option<Table>,
    pub plot: Option<Plot>,
}

impl Output {
    fn new(summary: String, result: Value) -> Self {
        Output { summary, result, fitted: BTreeMap::new(), table: None, plot: None }
    }
}

type Res = Result<Output, CliError>;

const CF_DEPTH: usize = 100;
const CERTIFICATE_EPSILONS: [f64; 3] = [1e-2, 1e-3, 1e-4];

fn lam(cfg: &RunConfig) -> CouplingTriple {
    let [a, b, c] = cfg.lambda.expect("resolved");
    CouplingTriple::new(a, b, c).expect("validated while parsing")
}

fn freq(cfg: &RunConfig) -> Result<Irrational, CliError> {
    Ok(Irrational::parse(&cfg.alpha, CF_DEPTH)?)
}

fn energies(cfg: &RunConfig) -> Vec<f64> {
    let mut e = cfg.energies.clone();
    if let Some(g) = cfg.e_grid {
        e.extend(linspace(g.lo, g.hi, g.n));
    }
    e
}

fn get<T: Copy>(v: Option<T>) -> T {
    v.expect("defaulted by RunConfig::resolve")
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value, CliError> {
    Ok(serde_json::to_value(v)?)
}

pub fn dispatch(cmd: Command, cfg: &RunConfig) -> Res {
    match cmd {
        Command::Regions => regions(cfg),
        Command::Dual => dual(cfg),
        Command::Resonances => resonance_list(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::Ids => ids(cfg),
        Command::Gaps => gaps(cfg),
        Command::MartiniProbe => martini(cfg),
        Command::Duality => duality(cfg),
        Command::Le => le(cfg),
        Command::LeStrip => le_strip(cfg),
        Command::Rotation => rotation(cfg),
        Command::Localize => localize(cfg),
        Command::Reduce => reduce(cfg),
        Command::Audit => audit(cfg),
    }
}

fn regions(cfg: &RunConfig) -> Res {
    let l = lam(cfg);
    let r = classify_region(&l);
    Ok(Output::new(r.as_str().to_string(), json!({ "lambda": l, "region": r.as_str() })))
}

fn dual(cfg: &RunConfig) -> Res {
    let l = lam(cfg);
    let d = l.dual();
    let summary = format!("{} {} {} {}", d.lambda1, d.lambda2, d.lambda3, d.region().as_str());
    let mut out = Output::new(
        summary,
        json!({ "lambda": l, "region": l.region().as_str(), "dual": d, "dual_region": d.region().as_str() }),
    );
    if let Some(size) = cfg.size {
        let a = freq(cfg)?;
        let ev = FiniteSection::new(&d, a.value(), cfg.theta.unwrap_or(0.0), 0, size)?.eigenvalues()?;
        let mut t = Table::new(vec!["index", "eigenvalue"]);
        for (i, e) in ev.iter().enumerate() {
            t.push(vec![i.into(), (*e).into()]);
        }
        out.result["eigenvalues"] = to_value(&ev)?;
        out.table = Some(t);
    }
    Ok(out)
}

fn resonance_list(cfg: &RunConfig) -> Res {
    let a = freq(cfg)?;
    let res = resonances(get(cfg.theta), &a, get(cfg.eps0), get(cfg.k_max))?;
    let mut t = Table::new(vec!["n_j", "dist", "bound"]);
    for r in &res.entries {
        t.push(vec![r.n.into(), r.dist.into(), res.bound(r.n).into()]);
    }
    let ns: Vec<String> = res.entries.iter().map(|r| r.n.to_string()).collect();
    let mut out = Output::new(format!("resonances: {}", ns.join(" ")), to_value(&res)?);
    out.table = Some(t);
    Ok(out)
}

fn parse_fraction(s: &str) -> Option<Result<(u64, u64), CliError>> {
    let (p, q) = s.split_once('/')?;
    Some(match (p.trim().parse(), q.trim().parse()) {
        (Ok(p), Ok(q)) => Ok((p, q)),
        _ => Err(CliError::Usage(format!("invalid value '{s}' for '--alpha': expected p/q"))),
    })
}

fn spectrum(cfg: &RunConfig) -> Res {
    let l = lam(cfg);
    if let Some(pq) = parse_fraction(&cfg.alpha) {
        let (p, q) = pq?;
        let s = spectrum_rational(&l, p, q, &linspace(0.0, 1.0, get(cfg.phases)), get(cfg.tol))?;
        let mut t = Table::new(vec!["band", "lo", "hi"]);
        for (i, (lo, hi)) in s.intervals.iter().enumerate() {
            t.push(vec![i.into(), (*lo).into(), (*hi).into()]);
        }
        let mut out = Output::new(format!("{} bands, measure {:.6}", s.intervals.len(), s.measure()), to_value(&s)?);
        out.result["measure"] = json!(s.measure());
        out.table = Some(t);
        return Ok(out);
    }
    let a = freq(cfg)?;
    let ev = FiniteSection::new(&l, a.value(), cfg.theta.unwrap_or(0.0), 0, get(cfg.size))?.eigenvalues()?;
    let mut t = Table::new(vec!["index", "eigenvalue"]);
    for (i, e) in ev.iter().enumerate() {
        t.push(vec![i.into(), (*e).into()]);
    }
    let summary = format!("{} eigenvalues in [{:.6}, {:.6}]", ev.len(), ev[0], ev[ev.len() - 1]);
    let mut out = Output::new(summary, json!({ "eigenvalues": ev }));
    out.table = Some(t);
    Ok(out)
}

fn staircase(title: &str, curve: &IDSCurve, gaps: &GapTable) -> Plot {
    Plot {
        title: title.to_string(),
        x_label: "E".into(),
        y_label: "N(E)".into(),
        series: vec![Series { label: "N".into(), xs: curve.energies.clone(), ys: curve.values.clone(), points: false }],
        markers: gaps
            .entries
            .iter()
            .map(|g| (g.e_minus, format!("k={}", g.label_k.map_or("?".to_string(), |k| k.to_string()))))
            .collect(),
        log_y: false,
    }
}

fn gap_rows(table: &GapTable) -> Table {
    let mut t = Table::new(vec!["e_minus", "e_plus", "width", "n_value", "label_k", "label_m", "residual"]);
    for g in &table.entries {
        t.push(vec![
            g.e_minus.into(),
            g.e_plus.into(),
            g.width.into(),
            g.n_value.into(),
            g.label_k.into(),
            g.label_m.into(),
            g.residual.into(),
        ]);
    }
    t
}

fn ids(cfg: &RunConfig) -> Res {
    let l = lam(cfg);
    let a = freq(cfg)?;
    let mut grid = energies(cfg);
    if grid.is_empty() {
        let (lo, hi) = l.gershgorin();
        grid = linspace(lo, hi, 801);
    }
    let (curve, plateau_tol) = match cfg.iters {
        Some(n) => (ids_rotation(&l, a.value(), &grid, n, get(cfg.phases))?, 1e-3),
        None => {
            let size = get(cfg.size);
            (ids_counting(&l, a.value(), &grid, size, get(cfg.phases), cfg.seed)?, 2.0 / size as f64)
        }
    };
    let gaps = detect_gaps(&curve, plateau_tol, get(cfg.tol)).label(&a, get(cfg.k_max));
    let mut t = Table::new(vec!["E", "N"]);
    for (e, n) in curve.energies.iter().zip(&curve.values) {
        t.push(vec![(*e).into(), (*n).into()]);
    }
    let mut out =
        Output::new(format!("{} energies, {} plateaus", grid.len(), gaps.entries.len()), json!({ "curve": curve, "gaps": gaps }));
    out.table = Some(t);
    out.plot = Some(staircase("Integrated density of states", &curve, &gaps));
    Ok(out)
}

fn gaps(cfg: &RunConfig) -> Res {
    let l = lam(cfg);
    let a = freq(cfg)?;
    let scan = GapScan {
        e_points: get(cfg.points),
        section_size: get(cfg.size),
        theta_samples: get(cfg.phases),
        seed: cfg.seed,
        min_width: get(cfg.tol),
        k_max: get(cfg.k_max),
    };
    let (table, curve) = gap_table(&l, &a, &scan)?;
    let lines: Vec<String> = table
        .entries
        .iter()
        .map(|g| format!("k={:?} m={:?} width={:.4}", g.label_k.unwrap_or(0), g.label_m.unwrap_or(0), g.width))
        .collect();
    let mut out = Output::new(format!("{} gaps\n{}", table.entries.len(), lines.join("\n")), to_value(&table)?);
    for g in &table.entries {
        if let Some(k) = g.label_k {
            out.fitted.insert(format!("width_k{k}_m{}", g.label_m.unwrap_or(0)), g.width);
        }
    }
    out.table = Some(gap_rows(&table));
    out.plot = Some(staircase("Labelled gaps", &curve, &table));
    Ok(out)
}

fn martini(cfg: &RunConfig) -> Res {
    let l = lam(cfg);
    let a = freq(cfg)?;
    let s = get(cfg.size);
    let r = martini_probe(&l, &a, get(cfg.k_max), &[s, 2 * s, 4 * s], get(cfg.tol))?;
    let mut t = Table::new(vec!["k", "n_target", "size", "e_lo", "e_hi", "width", "status"]);
    let mut lines = Vec::new();
    for p in &r.labels {
        let status = to_value(&p.status)?.as_str().unwrap_or_default().to_string();
        for w in &p.widths {
            t.push(vec![p.k.into(), p.n_target.into(), w.size.into(), w.e_lo.into(), w.e_hi.into(), w.width.into(), status.as_str().into()]);
        }
        lines.push(format!("k={:+} {status}", p.k));
    }
    if r.beta_warning {
        lines.push(format!("warning: beta estimate {:.3} is not small", r.beta));
    }
    let mut out = Output::new(lines.join("\n"), to_value(&r)?);
    out.table = Some(t);
    Ok(out)
}

fn duality(cfg: &RunConfig) -> Res {
    let l = lam(cfg);
    let a = freq(cfg)?;
    let r = duality_check(&l, a.value(), get(cfg.size), get(cfg.phases))?;
    let summary = format!("hausdorff {:.6} (forward {:.6}, backward {:.6})", r.hausdorff, r.forward, r.backward);
    Ok(Output::new(summary, to_value(&r)?))
}

fn lyapunov_rows(rows: &[(f64, f64, ehm_core::cocycle::LyapunovEstimate)]) -> Result<(Table, Value, String), CliError> {
    let mut t = Table::new(vec!["E", "eps", "estimate", "stderr"]);
    let mut lines = Vec::new();
    for (e, eps, le) in rows {
        t.push(vec![(*e).into(), (*eps).into(), le.estimate.into(), le.stderr.into()]);
        lines.push(format!("E={e:.6} eps={eps:.4} L={:.6} ± {:.1e}", le.estimate, le.stderr));
    }
    let v: Vec<Value> = rows
        .iter()
        .map(|(e, eps, le)| json!({ "energy": e, "eps": eps, "estimate": le.estimate, "stderr": le.stderr }))
        .collect();
    Ok((t, Value::Array(v), lines.join("\n")))
}

fn le(cfg: &RunConfig) -> Res {
    let l = if cfg.dual { lam(cfg).dual() } else { lam(cfg) };
    let a = freq(cfg)?;
    let mut rows = Vec::new();
    for e in energies(cfg) {
        let c = transfer(&l, a.value(), e, Variant::A)?;
        rows.push((e, 0.0, lyapunov(&c, get(cfg.iters), get(cfg.phases), cfg.seed)?));
    }
    let (t, v, summary) = lyapunov_rows(&rows)?;
    let mut out = Output::new(summary, json!({ "lambda": l, "rows": v }));
    out.table = Some(t);
    Ok(out)
}

fn le_strip(cfg: &RunConfig) -> Res {
    let l = lam(cfg);
    let a = freq(cfg)?;
    let mut rows = Vec::new();
    for e in energies(cfg) {
        for &eps in &cfg.eps {
            let c = transfer(&l, a.value(), e, Variant::ATilde)?.complexified(eps)?;
            rows.push((e, eps, lyapunov(&c, get(cfg.iters), get(cfg.phases), cfg.seed)?));
        }
    }
    let (t, v, summary) = lyapunov_rows(&rows)?;
    let strip = transfer(&l, a.value(), 0.0, Variant::ATilde)?.strip_radius();
    let mut out = Output::new(summary, json!({ "lambda": l, "strip_radius": strip, "rows": v }));
    out.table = Some(t);
    Ok(out)
}

fn rotation(cfg: &RunConfig) -> Res {
    let l = lam(cfg);
    let a = freq(cfg)?;
    let mut t = Table::new(vec!["E", "rho", "ids"]);
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for e in energies(cfg) {
        let rho = rotation_number(&transfer(&l, a.value(), e, Variant::ATilde)?, get(cfg.iters), get(cfg.phases))?;
        let n = ids_from_rotation(rho);
        t.push(vec![e.into(), rho.into(), n.into()]);
        rows.push(json!({ "energy": e, "rho": rho, "ids": n }));
        lines.push(format!("E={e:.6} rho={rho:.6} N={n:.6}"));
    }
    let mut out = Output::new(lines.join("\n"), json!({ "rows": rows }));
    out.table = Some(t);
    Ok(out)
}

fn localize(cfg: &RunConfig) -> Res {
    let l = lam(cfg);
    let a = freq(cfg)?;
    let theta = get(cfg.theta);
    let p = centered_dual_eigenpair(&l, a.value(), theta, get(cfg.size))?;
    let res = resonances(theta, &a, get(cfg.eps0), get(cfg.k_max))?;
    let e1 = epsilon1(&l)?;
    let prof = decay_profile(&p.u, p.start, &res, e1)?;
    let mut t = Table::new(vec!["k", "abs_u", "window", "fitted_rate"]);
    for (i, u) in prof.u_abs.iter().enumerate() {
        let k = prof.start + i as i64;
        let d = k.unsigned_abs() as f64;
        let w = prof.windows.iter().find(|w| d > w.lo && d < w.hi);
        t.push(vec![k.into(), (*u).into(), w.map(|w| w.j).into(), w.and_then(|w| w.fitted_rate).into()]);
    }
    let mut out = Output::new(String::new(), json!({
        "energy": p.energy,
        "dual_energy": p.dual_energy,
        "center_weight": p.center_weight,
        "epsilon1": e1,
        "resonances": res,
        "profile": prof,
    }));
    let mut lines = vec![format!("E={:.8} pass={} threshold={:.4}", p.energy, prof.pass, prof.threshold)];
    for w in &prof.windows {
        lines.push(format!("window {} ({:.0}, {:.0}) rate {:?}", w.j, w.lo, w.hi, w.fitted_rate));
        if let Some(r) = w.fitted_rate {
            out.fitted.insert(format!("rate_j{}", w.j), r);
        }
        out.fitted.insert(format!("c3_j{}", w.j), w.c3);
    }
    out.summary = lines.join("\n");
    out.table = Some(t);
    Ok(out)
}

fn reduce(cfg: &RunConfig) -> Res {
    let l = lam(cfg);
    let a = freq(cfg)?;
    let size = get(cfg.size);
    let k_max = get(cfg.k_max);
    if cfg.parabolic {
        let theta = get(cfg.theta);
        let p = centered_dual_eigenpair(&l, a.value(), theta, size)?;
        let pc = ParabolicConfig { k_max: k_max as usize, ..ParabolicConfig::default() };
        let pf = parabolic_reduce(&l, a.value(), p.energy, theta, &p, &pc)?;
        let cert = gap_opening_certificate(&pf, &CERTIFICATE_EPSILONS, k_max as usize)?;
        let mut t = Table::new(vec!["epsilon", "trace", "predicted", "deviation", "uniformly_hyperbolic"]);
        for r in &cert.rows {
            t.push(vec![r.epsilon.into(), r.trace.into(), r.predicted.into(), r.deviation.into(), r.uniformly_hyperbolic.to_string().as_str().into()]);
        }
        let mut out = Output::new(
            format!("E={:.8} d={} a={:.6} exponent={:?} open side {:+}", p.energy, pf.d, pf.a, cert.exponent, cert.open_side),
            json!({
                "energy": p.energy,
                "theta": theta,
                "form": {
                    "a": pf.a, "d": pf.d, "m11sq": pf.m11sq, "m11m12": pf.m11m12, "m12sq": pf.m12sq,
                    "residual": pf.residual, "cohomology_residual": pf.cohomology_residual,
                    "case_b_ratio": pf.case_b_ratio, "eta_mismatch": pf.eta_mismatch, "imag_part": pf.imag_part,
                },
                "certificate": cert,
            }),
        );
        out.fitted.insert("a".into(), pf.a);
        out.fitted.insert("m11sq".into(), pf.m11sq);
        if let Some(e) = cert.exponent {
            out.fitted.insert("exponent".into(), e);
        }
        out.table = Some(t);
        return Ok(out);
    }
    let energy = match (cfg.energies.first(), cfg.theta) {
        (Some(&e), _) => e,
        (None, Some(t)) => centered_dual_eigenpair(&l, a.value(), t, size)?.energy,
        (None, None) => unreachable!("resolve requires --theta or --E"),
    };
    let ar = ArConfig { theta: cfg.theta, section_size: size, k_max, epsilon0: get(cfg.eps0), ..ArConfig::default() };
    let r = almost_reduce(&l, &a, energy, get(cfg.j), &cfg.windows, &ar)?;
    let mut result = to_value(&r)?;
    if let Some(items) = result.get_mut("results").and_then(Value::as_array_mut) {
        for item in items {
            if let Some(obj) = item.as_object_mut() {
                obj.remove("w2");
            }
        }
    }
    let mut t = Table::new(vec!["window", "defect", "degree", "det_min", "l_value", "w_norm"]);
    for c in &r.results {
        t.push(vec![c.window.into(), c.defect.into(), c.measured_degree.into(), c.det_min.into(), c.l_value.into(), c.w_norm.into()]);
    }
    let defects: Vec<String> = r.results.iter().map(|c| format!("{:.2e}", c.defect)).collect();
    let mut out = Output::new(
        format!("E={:.8} theta={:.6} n_j={} defects [{}] trend_ok={}", r.energy, r.theta, r.n_j, defects.join(", "), r.trend_ok),
        result,
    );
    if let Some((c_big, c)) = r.fitted_decay() {
        out.fitted.insert("C".into(), c_big);
        out.fitted.insert("c".into(), c);
    }
    out.table = Some(t);
    out.plot = Some(Plot {
        title: "Conjugacy defect".into(),
        x_label: "window".into(),
        y_label: "defect".into(),
        series: vec![Series {
            label: "defect".into(),
            xs: r.results.iter().map(|c| c.window as f64).collect(),
            ys: r.results.iter().map(|c| c.defect).collect(),
            points: true,
        }],
        markers: vec![],
        log_y: true,
    });
    Ok(out)
}

fn audit(cfg: &RunConfig) -> Res {
    let a = freq(cfg)?;
    let params = AuditParams { max_q: get(cfg.k_max).max(0) as u64, samples: get(cfg.points), r: 1 };
    let mut t = Table::new(vec!["mode", "n", "q_n", "q_next", "r", "implied_max", "implied_mean"]);
    let mut lines = Vec::new();
    let mut reports = Vec::new();
    let mut fitted = BTreeMap::new();
    for (name, mode) in [("log_sin", AuditMode::LogSin), ("trig_poly", AuditMode::TrigPoly)] {
        let rep = constant_audit(&a, mode, &params, cfg.seed)?;
        for r in &rep.rows {
            t.push(vec![name.into(), r.n.into(), (r.q_n as i64).into(), (r.q_next as i64).into(), (r.r as i64).into(), r.implied_max.into(), r.implied_mean.into()]);
        }
        let worst = rep.rows.iter().map(|r| r.implied_max).fold(0.0, f64::max);
        fitted.insert(format!("{name}_max"), worst);
        lines.push(format!("{name}: {} rows, no growth: {}", rep.rows.len(), rep.no_growth));
        reports.push(rep);
    }
    let mut out = Output::new(lines.join("\n"), to_value(&reports)?);
    out.fitted = fitted;
    out.table = Some(t);
    Ok(out)
}
