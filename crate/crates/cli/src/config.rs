use crate::cli::{Command, EGrid, Opts};
use crate::CliError;
use serde::{Deserialize, Serialize};

/// Fully resolved run parameters; every report embeds one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub lambda: Option<[f64; 3]>,
    pub alpha: String,
    pub theta: Option<f64>,
    pub energies: Vec<f64>,
    pub e_grid: Option<EGrid>,
    pub size: Option<usize>,
    pub iters: Option<usize>,
    pub phases: Option<usize>,
    pub points: Option<usize>,
    pub seed: u64,
    pub k_max: Option<i64>,
    pub eps0: Option<f64>,
    pub eps: Vec<f64>,
    pub windows: Vec<i64>,
    pub j: Option<usize>,
    pub tol: Option<f64>,
    pub dual: bool,
    pub parabolic: bool,
    pub out: Option<String>,
    pub json: bool,
    pub csv: bool,
    pub svg: bool,
}

fn pick<T>(given: Option<T>, default: Option<T>) -> Option<T> {
    given.or(default)
}

impl RunConfig {
    pub fn resolve(cmd: Command, o: &Opts) -> Result<Self, CliError> {
        use Command::*;
        if o.svg && o.out.is_none() {
            return Err(CliError::Usage("--svg needs --out".into()));
        }
        let needs_lambda = !matches!(cmd, Resonances | Audit);
        if needs_lambda && o.lambda.is_none() {
            return Err(CliError::Usage("--lambda is required".into()));
        }
        if matches!(cmd, Resonances | Localize) && o.theta.is_none() {
            return Err(CliError::Usage("--theta is required".into()));
        }
        if matches!(cmd, Le | LeStrip | Rotation) && o.energies.is_empty() && o.e_grid.is_none() {
            return Err(CliError::Usage("--E or --e-grid is required".into()));
        }
        if matches!(cmd, Reduce) && o.theta.is_none() && (o.parabolic || o.energies.is_empty()) {
            return Err(CliError::Usage("--theta is required".into()));
        }
        let size = match cmd {
            Spectrum => Some(400),
            Ids | Gaps | Duality => Some(1000),
            MartiniProbe => Some(500),
            Localize => Some(2001),
            Reduce => Some(401),
            _ => None,
        };
        let iters = match cmd {
            Le | LeStrip | Rotation => Some(100_000),
            _ => None,
        };
        let phases = match cmd {
            Spectrum => Some(32),
            Ids | Gaps => Some(8),
            Duality | Le | LeStrip => Some(4),
            Rotation => Some(16),
            _ => None,
        };
        let points = match cmd {
            Gaps => Some(2000),
            Audit => Some(100),
            _ => None,
        };
        let k_max = match cmd {
            Resonances => Some(1000),
            Ids | Gaps => Some(10),
            MartiniProbe => Some(3),
            Localize => Some(2000),
            Reduce => Some(200),
            Audit => Some(233),
            _ => None,
        };
        let eps0 = matches!(cmd, Resonances | Localize | Reduce).then_some(0.2);
        let tol = match cmd {
            Spectrum => Some(1e-10),
            Ids | Gaps => Some(0.01),
            MartiniProbe => Some(1e-3),
            _ => None,
        };
        let windows = if o.window.is_empty() && matches!(cmd, Reduce) && !o.parabolic {
            vec![4, 8, 16, 32]
        } else {
            o.window.clone()
        };
        let eps = if o.eps.is_empty() && matches!(cmd, LeStrip) { vec![0.0] } else { o.eps.clone() };
        Ok(RunConfig {
            command: cmd.name().to_string(),
            lambda: o.lambda,
            alpha: o.alpha.clone().unwrap_or_else(|| "golden".to_string()),
            theta: o.theta,
            energies: o.energies.clone(),
            e_grid: o.e_grid,
            size: pick(o.size, size),
            iters: pick(o.iters, iters),
            phases: pick(o.phases, phases),
            points: pick(o.points, points),
            seed: o.seed.unwrap_or(0),
            k_max: pick(o.k_max, k_max),
            eps0: pick(o.eps0, eps0),
            eps,
            windows,
            j: pick(o.j, matches!(cmd, Reduce).then_some(0)),
            tol: pick(o.tol, tol),
            dual: o.dual,
            parabolic: o.parabolic,
            out: o.out.as_ref().map(|p| p.display().to_string()),
            json: o.json,
            csv: o.csv,
            svg: o.svg,
        })
    }
}
