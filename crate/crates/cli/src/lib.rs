//! Command-line front end: argument parsing, resolved run configurations and
//! JSON, CSV and SVG emission.

pub mod cli;
mod commands;
pub mod config;
pub mod report;
pub mod svg;

use clap::error::ErrorKind;
use clap::Parser;
use std::ffi::OsString;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

pub use cli::{Cli, Command};
pub use config::RunConfig;
pub use report::Report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] ehm_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 2,
            _ => 1,
        }
    }
}

fn write_file(dir: &Path, name: &str, ext: &str, body: &str) -> Result<(), CliError> {
    std::fs::write(dir.join(format!("{name}.{ext}")), body)?;
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(cli.command, &cli.opts)?;
    let start = Instant::now();
    let out = commands::dispatch(cli.command, &cfg)?;
    let report = Report {
        schema_version: report::SCHEMA_VERSION,
        command: cfg.command.clone(),
        config: cfg.clone(),
        result: out.result,
        fitted_constants: out.fitted,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let json = report::to_json(&report)?;
    let csv = out.table.as_ref().map(|t| t.to_csv()).transpose()?;
    if let Some(dir) = &cli.opts.out {
        std::fs::create_dir_all(dir)?;
        write_file(dir, &cfg.command, "json", &json)?;
        if let Some(csv) = &csv {
            write_file(dir, &cfg.command, "csv", csv)?;
        }
        if cfg.svg {
            match &out.plot {
                Some(p) => write_file(dir, &cfg.command, "svg", &p.render())?,
                None => eprintln!("note: `{}` has no plot", cfg.command),
            }
        }
    }
    let mut stdout = std::io::stdout().lock();
    if cfg.json {
        stdout.write_all(json.as_bytes())?;
    }
    if cfg.csv {
        match &csv {
            Some(c) => stdout.write_all(c.as_bytes())?,
            None => eprintln!("note: `{}` has no table", cfg.command),
        }
    }
    if !cfg.json && !cfg.csv {
        writeln!(stdout, "{}", out.summary)?;
    }
    Ok(())
}

/// Runs the command line `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    0
                }
                _ => {
                    eprint!("{}", e.render());
                    1
                }
            };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
