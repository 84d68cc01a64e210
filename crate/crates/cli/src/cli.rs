use clap::{Args, Parser, Subcommand};
use ehm_core::CouplingTriple;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "ehm", version, about = "Spectral and dynamical numerics for the extended Harper's model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Classify a coupling triple into region I, II, III or a boundary.
    Regions,
    /// Dual triple, and optionally the eigenvalues of a dual finite section.
    Dual,
    /// Resonances of a phase.
    Resonances,
    /// Band intervals for rational α, finite-section eigenvalues otherwise.
    Spectrum,
    /// Integrated density of states on an energy grid.
    Ids,
    /// Labelled IDS plateaus.
    Gaps,
    /// Openness of the gaps with small labels.
    MartiniProbe,
    /// Hausdorff distance between a spectrum and the scaled dual spectrum.
    Duality,
    /// Lyapunov exponent of the transfer cocycle.
    Le,
    /// Lyapunov exponent of the symmetrised cocycle off the real axis.
    LeStrip,
    /// Fibered rotation number of the symmetrised cocycle.
    Rotation,
    /// Decay profile of a dual eigenvector.
    Localize,
    /// Conjugations towards rotations, or the parabolic form at a gap edge.
    Reduce,
    /// Implied constants of the trigonometric estimates.
    Audit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Regions => "regions",
            Command::Dual => "dual",
            Command::Resonances => "resonances",
            Command::Spectrum => "spectrum",
            Command::Ids => "ids",
            Command::Gaps => "gaps",
            Command::MartiniProbe => "martini-probe",
            Command::Duality => "duality",
            Command::Le => "le",
            Command::LeStrip => "le-strip",
            Command::Rotation => "rotation",
            Command::Localize => "localize",
            Command::Reduce => "reduce",
            Command::Audit => "audit",
        }
    }
}

/// `lo:hi:n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

fn parse_lambda(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected three comma-separated numbers".into());
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.trim().parse().map_err(|_| format!("`{p}` is not a number"))?;
    }
    CouplingTriple::new(out[0], out[1], out[2]).map_err(|e| e.to_string())?;
    Ok(out)
}

fn parse_grid(s: &str) -> Result<EGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err("expected lo:hi:n".into());
    };
    let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("`{p}` is not a number"));
    let n: usize = n.trim().parse().map_err(|_| format!("`{n}` is not a point count"))?;
    let (lo, hi) = (num(lo)?, num(hi)?);
    if n < 2 || lo >= hi {
        return Err("need lo < hi and n ≥ 2".into());
    }
    Ok(EGrid { lo, hi, n })
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Couplings λ₁,λ₂,λ₃.
    #[arg(long, global = true, value_parser = parse_lambda, allow_hyphen_values = true)]
    pub lambda: Option<[f64; 3]>,
    /// Frequency: golden, silver, a decimal, or p/q for `spectrum`.
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Energies, comma separated.
    #[arg(long = "E", global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub energies: Vec<f64>,
    /// Energy grid lo:hi:n.
    #[arg(long, global = true, value_parser = parse_grid, allow_hyphen_values = true)]
    pub e_grid: Option<EGrid>,
    /// Finite-section size.
    #[arg(long, global = true)]
    pub size: Option<usize>,
    /// Cocycle iterations.
    #[arg(long, global = true)]
    pub iters: Option<usize>,
    /// Number of phase samples.
    #[arg(long, global = true)]
    pub phases: Option<usize>,
    /// Energy points for `gaps`, samples per denominator for `audit`.
    #[arg(long, global = true)]
    pub points: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub k_max: Option<i64>,
    #[arg(long, global = true)]
    pub eps0: Option<f64>,
    /// Imaginary heights for `le-strip`, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub eps: Vec<f64>,
    /// Window sizes for `reduce`, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub window: Vec<i64>,
    /// Resonance index for `reduce`.
    #[arg(long, global = true)]
    pub j: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Use the dual triple (`le`).
    #[arg(long, global = true)]
    pub dual: bool,
    /// Parabolic reduction and gap certificate (`reduce`).
    #[arg(long, global = true)]
    pub parabolic: bool,
    /// Directory for JSON, CSV and SVG files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write an SVG plot (needs --out).
    #[arg(long, global = true)]
    pub svg: bool,
    /// Print the JSON report to standard output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Print the CSV table to standard output.
    #[arg(long, global = true)]
    pub csv: bool,
}
