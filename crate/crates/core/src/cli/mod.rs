//! Command-line driver. Exit codes: 0 success, 2 invalid input, 3 numerical
//! failure (including a round trip that misses its tolerance).

mod commands;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};

pub use report::{Check, CoefficientRow, Report, UnrecoverableRow};

#[derive(Parser, Debug)]
#[command(name = "bottomwell", version, about = "Quantum Birkhoff canonical forms at the bottom of a well")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hamiltonian JSON → canonical form JSON (and residual JSON beside it).
    Normalize(Flags),
    /// Canonical form → spectrum CSV.
    Spectrum(Flags),
    /// Frequencies → resonance order and relations.
    Resonance(Flags),
    /// Canonical form + probe → truncated trace JSON with its expansion.
    Trace(Flags),
    /// Spectrum CSVs → recovered canonical form JSON.
    Recover(Flags),
    /// Hamiltonian → normalize → spectra → recover → report JSON.
    Roundtrip(Flags),
}

#[derive(Args, Debug, Clone, Default)]
struct Flags {
    #[arg(long)]
    hamiltonian: Option<PathBuf>,
    #[arg(long)]
    canonical: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    spectra: Vec<PathBuf>,
    #[arg(long)]
    max_degree: Option<u32>,
    #[arg(long)]
    order: Option<u32>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    hbar: Vec<f64>,
    #[arg(long, allow_negative_numbers = true)]
    cutoff: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    frequencies: Vec<f64>,
    #[arg(long)]
    bound: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    tolerance: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    numeric: bool,
    #[arg(long)]
    paper_strict: bool,
    /// Complex time of the trace probe, `re,im` with `im > 0`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    t: Vec<f64>,
    /// Resonant recovery: fit all stages from cluster sums.
    #[arg(long)]
    cluster_sums: bool,
}

/// Validated settings of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: &'static str,
    pub hamiltonian: Option<PathBuf>,
    pub canonical: Option<PathBuf>,
    pub spectra: Vec<PathBuf>,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub max_degree: Option<u32>,
    pub l_max: Option<u32>,
    pub hbar: Vec<f64>,
    pub cutoff: Option<f64>,
    pub frequencies: Option<Vec<f64>>,
    pub bound: u32,
    pub tolerance: Option<f64>,
    pub seed: u64,
    pub numeric: bool,
    pub paper_strict: bool,
    pub t: Option<(f64, f64)>,
    pub cluster_sums: bool,
}

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_BOUND: u32 = 10;

impl RunConfig {
    fn from_flags(command: &'static str, f: Flags) -> Result<Self> {
        if let Some(i) = f.hbar.iter().position(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(Error::validation(format!("hbar[{i}]"), "ħ values must be positive"));
        }
        if let Some(i) = f.hbar.windows(2).position(|w| w[1] >= w[0]) {
            return Err(Error::validation(format!("hbar[{}]", i + 1), "ħ values must be strictly decreasing"));
        }
        if let Some(c) = f.cutoff {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::validation("cutoff", "must be positive"));
            }
        }
        if let Some(t) = f.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::validation("tolerance", "must be positive"));
            }
        }
        let t = match f.t.as_slice() {
            [] => None,
            [re, im] => Some((*re, *im)),
            _ => return Err(Error::validation("t", "expected two numbers: re,im")),
        };
        let mut paths: Vec<(&str, &PathBuf)> = Vec::new();
        for (name, p) in [
            ("hamiltonian", &f.hamiltonian),
            ("canonical", &f.canonical),
            ("out", &f.out),
            ("report", &f.report),
        ] {
            if let Some(p) = p {
                paths.push((name, p));
            }
        }
        for p in &f.spectra {
            paths.push(("spectra", p));
        }
        for (i, (name, p)) in paths.iter().enumerate() {
            if let Some((other, _)) = paths[..i].iter().find(|(_, q)| q == p) {
                return Err(Error::validation(*name, format!("path {} is also used for --{other}", p.display())));
            }
        }
        Ok(RunConfig {
            command,
            hamiltonian: f.hamiltonian,
            canonical: f.canonical,
            spectra: f.spectra,
            out: f.out,
            report: f.report,
            max_degree: f.max_degree,
            l_max: f.order,
            hbar: f.hbar,
            cutoff: f.cutoff,
            frequencies: if f.frequencies.is_empty() { None } else { Some(f.frequencies) },
            bound: f.bound.unwrap_or(DEFAULT_BOUND),
            tolerance: f.tolerance,
            seed: f.seed.unwrap_or(DEFAULT_SEED),
            numeric: f.numeric,
            paper_strict: f.paper_strict,
            t,
            cluster_sums: f.cluster_sums,
        })
    }
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("BOTTOMWELL_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Runs one invocation; returns the process exit code. Results go to the
/// requested files, short summaries to stdout, errors to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (name, flags) = match cli.command {
        Command::Normalize(f) => ("normalize", f),
        Command::Spectrum(f) => ("spectrum", f),
        Command::Resonance(f) => ("resonance", f),
        Command::Trace(f) => ("trace", f),
        Command::Recover(f) => ("recover", f),
        Command::Roundtrip(f) => ("roundtrip", f),
    };
    let mut stdout = std::io::stdout().lock();
    match RunConfig::from_flags(name, flags).and_then(|cfg| commands::run(&cfg, &mut stdout)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
