use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;

use super::report::{Check, CoefficientRow, Report, UnrecoverableRow};
use super::RunConfig;
use crate::error::{Error, Result};
use crate::inverse::{geometric_grid, recover, RecoverOptions};
use crate::io;
use crate::normal_form::{
    frequencies_from_jet, normalize, resonance_order, stage, CanonicalForm, FrequencyVector, NormalizeOptions,
    ResonanceSpec, ResonantResidual,
};
use crate::spectral::{
    bnf_eigenvalues, hermite_validate, points_below, resonant_eigenvalues, truncated_trace, zelditch_expansion, Bump,
    HermiteOptions, SpectrumSample, TraceProbe,
};
use crate::symbol::GradedPolynomial;

const DETECTION_TOL: f64 = 1e-9;
const ROUNDTRIP_TOL: f64 = 1e-6;
const P0_TOL: f64 = 1e-9;
const ROUNDTRIP_HBAR_MAX: f64 = 0.02;
const ROUNDTRIP_GRID: usize = 6;
const RECOVER_L_MAX: u32 = 3;
const TRACE_ORDER: u32 = 2;

pub fn run(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let start = Instant::now();
    let result = match cfg.command {
        "normalize" => normalize_cmd(cfg, stdout),
        "spectrum" => spectrum_cmd(cfg, stdout),
        "resonance" => resonance_cmd(cfg, stdout),
        "trace" => trace_cmd(cfg, stdout),
        "recover" => recover_cmd(cfg, stdout),
        "roundtrip" => roundtrip_cmd(cfg, stdout),
        other => Err(Error::validation("command", format!("unknown command {other}"))),
    };
    log::info!("{} finished in {:.3} s", cfg.command, start.elapsed().as_secs_f64());
    result
}

fn required<'a, T>(v: &'a Option<T>, flag: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| Error::validation(flag, format!("--{flag} is required")))
}

fn say(out: &mut dyn Write, text: &str) -> Result<()> {
    writeln!(out, "{text}").map_err(|source| Error::Io { path: "<stdout>".into(), source })
}

/// Reads and parses a file, prefixing validation messages with its path.
fn load<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T>) -> Result<T> {
    let text = io::read_text(path)?;
    parse(&text).map_err(|e| match e {
        Error::Validation { field, message } => Error::validation(field, format!("{}: {message}", path.display())),
        other => other,
    })
}

fn emit(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => io::write_atomic(p, text.as_bytes()),
        None => out
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io { path: "<stdout>".into(), source }),
    }
}

/// `cf.json` ↦ `cf.residual.json`.
pub fn residual_path(canonical: &Path) -> PathBuf {
    canonical.with_extension("residual.json")
}

fn load_hamiltonian(cfg: &RunConfig) -> Result<GradedPolynomial> {
    let h = load(required(&cfg.hamiltonian, "hamiltonian")?, io::hamiltonian_from_json)?;
    Ok(match cfg.max_degree {
        Some(cap) => h.with_cap(cap),
        None => h,
    })
}

fn frequency_vector(cfg: &RunConfig, h: Option<&GradedPolynomial>) -> Result<FrequencyVector> {
    let u = match (&cfg.frequencies, h) {
        (Some(u), _) => u.clone(),
        (None, Some(h)) => frequencies_from_jet(h)?,
        (None, None) => return Err(Error::validation("frequencies", "--frequencies is required")),
    };
    FrequencyVector::with_settings(u, vec![], cfg.bound, DETECTION_TOL)
}

fn normal_form(cfg: &RunConfig, h: &GradedPolynomial) -> Result<(CanonicalForm, ResonantResidual)> {
    let freq = frequency_vector(cfg, Some(h))?;
    let spec = resonance_order(&freq)?;
    let opts = NormalizeOptions {
        l_max: cfg.l_max,
        small_divisor_floor: cfg.tolerance,
        ..NormalizeOptions::default()
    };
    let nf = normalize(h, &freq, &spec, &opts)?;
    Ok((nf.canonical, nf.residual))
}

fn normalize_cmd(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let out = required(&cfg.out, "out")?;
    let h = load_hamiltonian(cfg)?;
    let (cf, k) = normal_form(cfg, &h)?;
    io::write_atomic(out, io::canonical_to_json(&cf).as_bytes())?;
    let rpath = residual_path(out);
    io::write_atomic(&rpath, io::residual_to_json(&k).as_bytes())?;
    if k.has_degree_d_terms {
        log::warn!("the residual has monomials of degree exactly d");
    }
    say(
        stdout,
        &format!(
            "n={} u={:?} d={} L_max={} coefficients={} residual_terms={}",
            cf.n,
            cf.u,
            order_text(&cf.resonance),
            cf.l_max,
            cf.coeffs.len(),
            k.k.len()
        ),
    )
}

fn order_text(spec: &ResonanceSpec) -> String {
    spec.order().map_or("inf".to_string(), |d| d.to_string())
}

/// The canonical form plus its residual; a resonant form without a residual
/// file beside it is treated as `K = 0`.
fn load_canonical(cfg: &RunConfig) -> Result<(CanonicalForm, ResonantResidual)> {
    let path = required(&cfg.canonical, "canonical")?;
    let cf = load(path, io::canonical_from_json)?;
    let rpath = residual_path(path);
    let k = if rpath.exists() {
        load(&rpath, |t| io::residual_from_json(t, &cf.resonance))?
    } else {
        if cf.resonance.is_resonant() {
            log::warn!("no residual at {}; using K = 0", rpath.display());
        }
        ResonantResidual::empty(cf.n, 2, cf.resonance.order())
    };
    Ok((cf, k))
}

fn forward(cf: &CanonicalForm, k: &ResonantResidual, hbar: f64, e_cut: f64) -> Result<SpectrumSample> {
    let s = if cf.resonance.is_resonant() {
        resonant_eigenvalues(cf, k, hbar, e_cut)?
    } else {
        bnf_eigenvalues(cf, hbar, e_cut)?
    };
    if s.entries.is_empty() {
        return Err(Error::validation("cutoff", format!("no level below E_cut = {e_cut} at ħ = {hbar}")));
    }
    Ok(s)
}

fn numeric_sample(h: &GradedPolynomial, model: &SpectrumSample, tol: Option<f64>) -> Result<SpectrumSample> {
    let count = model.count() + 1;
    let quanta = model
        .entries
        .iter()
        .filter_map(|e| e.label.as_ref())
        .flat_map(|l| l.members())
        .map(|k| k.order())
        .max()
        .unwrap_or(0)
        + 8;
    let opts = HermiteOptions {
        tol: tol.unwrap_or(HermiteOptions::default().tol),
        ..HermiteOptions::default()
    };
    let s = hermite_validate(h, model.hbar, quanta, count, &opts)?;
    let levels = s.energies().into_iter().map(|e| (e, None)).collect();
    SpectrumSample::from_levels(model.hbar, model.e_cut, levels, 1e-10, s.source)
}

fn spectrum_cmd(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let (cf, k) = load_canonical(cfg)?;
    if cfg.hbar.is_empty() {
        return Err(Error::validation("hbar", "--hbar is required"));
    }
    let e_cut = *required(&cfg.cutoff, "cutoff")?;
    let h = if cfg.numeric { Some(load_hamiltonian(cfg)?) } else { None };
    let mut samples = Vec::new();
    for &hbar in &cfg.hbar {
        let s = forward(&cf, &k, hbar, e_cut)?;
        samples.push(match &h {
            Some(h) => numeric_sample(h, &s, cfg.tolerance)?,
            None => s,
        });
        log::info!("ħ = {hbar}: {} levels", samples.last().map_or(0, |s| s.count()));
    }
    emit(stdout, cfg.out.as_ref(), &io::spectra_to_csv(&samples))
}

fn resonance_cmd(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let u = required(&cfg.frequencies, "frequencies")?.clone();
    let freq = FrequencyVector::with_settings(u, vec![], cfg.bound, cfg.tolerance.unwrap_or(DETECTION_TOL))?;
    let spec = resonance_order(&freq)?;
    match &spec {
        ResonanceSpec::NonResonant { bound } => say(stdout, &format!("d=inf (no relation with |α| ≤ {bound})"))?,
        ResonanceSpec::Resonant { d, relations, .. } => {
            say(stdout, &format!("d={d}"))?;
            for rel in relations {
                let parts: Vec<String> = rel.iter().map(|a| a.to_string()).collect();
                say(stdout, &format!("relation ({})", parts.join(",")))?;
            }
        }
    }
    if let Some(out) = &cfg.out {
        io::write_atomic(out, io::to_json(&spec).as_bytes())?;
    }
    Ok(())
}

fn trace_cmd(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let (cf, k) = load_canonical(cfg)?;
    let hbar = match cfg.hbar.as_slice() {
        [h] => *h,
        _ => return Err(Error::validation("hbar", "trace takes exactly one ħ")),
    };
    let eps = *required(&cfg.cutoff, "cutoff")?;
    let (re, im) = *required(&cfg.t, "t")?;
    let t = Complex64::new(re, im);
    let probe = TraceProbe::new(t, eps, Bump::default())?;
    let sample = forward(&cf, &k, hbar, eps)?;
    let tv = truncated_trace(&sample, &probe)?;
    let order = cfg.l_max.unwrap_or(TRACE_ORDER);
    let z = zelditch_expansion(&cf, hbar, t, order)?;
    let rec = io::TraceRecord {
        t_re: re,
        t_im: im,
        eps,
        value_re: tv.value.re,
        value_im: tv.value.im,
        tail_bound: tv.tail_bound,
        hbar,
        zelditch_order: order,
        zelditch_re: z.re,
        zelditch_im: z.im,
    };
    log::info!("trace {} vs expansion {} (tail bound {:e})", tv.value, z, tv.tail_bound);
    emit(stdout, cfg.out.as_ref(), &io::to_json(&rec))
}

fn recover_options(cfg: &RunConfig, n: Option<usize>) -> RecoverOptions {
    let mut opts = RecoverOptions {
        l_max: cfg.l_max.unwrap_or(RECOVER_L_MAX),
        n,
        frequencies: cfg.frequencies.clone(),
        resonance_bound: cfg.bound,
        cluster_sum_extension: cfg.cluster_sums,
        ..RecoverOptions::default()
    };
    if let Some(t) = cfg.tolerance {
        opts.detection_tol = t;
    }
    opts.assemble.paper_strict = cfg.paper_strict;
    opts
}

fn recover_cmd(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    if cfg.spectra.is_empty() {
        return Err(Error::validation("spectra", "--spectra is required"));
    }
    let mut samples = Vec::new();
    for p in &cfg.spectra {
        samples.extend(load(p, io::spectra_from_csv)?);
    }
    samples.sort_by(|a, b| b.hbar.total_cmp(&a.hbar));
    if let Some(w) = samples.windows(2).find(|w| w[0].hbar == w[1].hbar) {
        return Err(Error::validation("spectra", format!("ħ = {} appears twice", w[0].hbar)));
    }
    let n = cfg.frequencies.as_ref().map(|u| u.len());
    let rf = recover(&samples, &recover_options(cfg, n))?;
    for w in &rf.diagnostics.warnings {
        log::warn!("{w}");
    }
    emit(stdout, cfg.out.as_ref(), &io::recovered_to_json(&rf))
}

/// `ν` cutoff covering every point with `|k| ≤ reach`, placed in the widest
/// gap of the unperturbed spectrum within one quantum above them.
pub fn auto_window(u: &[f64], reach: u32) -> f64 {
    let top = points_below(u, u.iter().sum::<f64>() / 2.0 + reach as f64 * u.iter().fold(0.0, |a: f64, &x| a.max(x)))
        .into_iter()
        .filter(|(k, _)| k.order() <= reach)
        .map(|(_, v)| v)
        .fold(0.0, f64::max);
    let quantum = u.iter().copied().fold(f64::INFINITY, f64::min);
    let mut levels: Vec<f64> = points_below(u, top + 2.0 * quantum)
        .into_iter()
        .map(|(_, v)| v)
        .filter(|&v| v > top * (1.0 + 1e-12))
        .collect();
    levels.sort_by(f64::total_cmp);
    let past = levels.iter().position(|&v| v > top + quantum).map_or(levels.len(), |p| p + 1);
    levels.truncate(past);
    levels.insert(0, top);
    let (lo, hi) = levels
        .windows(2)
        .map(|w| (w[0], w[1]))
        .fold((top, top), |best, g| if g.1 - g.0 > best.1 - best.0 { g } else { best });
    (lo + hi) / 2.0
}

fn roundtrip_cmd(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let h = load_hamiltonian(cfg)?;
    let t0 = Instant::now();
    let (cf, k) = normal_form(cfg, &h)?;
    log::info!("normalize: {:.3} s", t0.elapsed().as_secs_f64());

    let hbars = if cfg.hbar.is_empty() {
        geometric_grid(ROUNDTRIP_HBAR_MAX, ROUNDTRIP_GRID)
    } else {
        cfg.hbar.clone()
    };
    let mut opts = recover_options(cfg, Some(cf.n));
    opts.frequencies = None;
    opts.l_max = opts.l_max.min(cf.l_max);
    let nu_cut = match cfg.cutoff {
        Some(c) => c / hbars[0],
        None => auto_window(&cf.u, opts.l_max + 1),
    };
    let t1 = Instant::now();
    let mut samples = Vec::new();
    for &hbar in &hbars {
        let mut s = forward(&cf, &k, hbar, nu_cut * hbar)?;
        for e in &mut s.entries {
            e.label = None;
        }
        samples.push(s);
    }
    log::info!("spectra: {:.3} s", t1.elapsed().as_secs_f64());

    let t2 = Instant::now();
    let rf = recover(&samples, &opts)?;
    log::info!("recover: {:.3} s", t2.elapsed().as_secs_f64());

    let dg = &rf.diagnostics;
    let comparable = |r: &crate::symbol::MultiIndex, i: u32| {
        stage(r, i) >= 1
            && stage(r, i) <= rf.form.l_max as i64
            && !dg.unrecoverable.iter().any(|(rr, ii)| rr == r && *ii == i)
            && dg.caps.as_ref().is_none_or(|c| cfg.cluster_sums || c.admits(r, i))
    };
    let mut keys: Vec<_> = cf.coeffs.keys().chain(rf.form.coeffs.keys()).cloned().collect();
    keys.sort();
    keys.dedup();
    let rows: Vec<CoefficientRow> = keys
        .into_iter()
        .filter(|(r, i)| comparable(r, *i))
        .map(|(r, i)| {
            let truth = cf.coeff(&r, i);
            let recovered = rf.form.coeff(&r, i);
            CoefficientRow { r, i, truth, recovered, error: (recovered - truth).abs() }
        })
        .collect();
    let tol = cfg.tolerance.unwrap_or(ROUNDTRIP_TOL);
    let max_err = rows.iter().map(|r| r.error).fold(0.0, f64::max);
    let u_err = cf.u.iter().zip(&rf.form.u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let constraint = dg.constraints.values().map(|c| c.abs()).fold(0.0, f64::max);
    let checks = vec![
        Check::at_most("max_coeff_error", max_err, tol),
        Check::at_most("frequency_error", u_err, tol),
        Check::at_most("p0_residual", dg.residuals.get("p0").copied().unwrap_or(0.0), P0_TOL),
        Check::at_most("constraint_residual", constraint, tol),
    ];
    let passed = checks.iter().all(|c| c.pass) && rf.form.resonance.order() == cf.resonance.order();
    let report = Report {
        command: "roundtrip".into(),
        seed: cfg.seed,
        n: cf.n,
        u: cf.u.clone(),
        u_recovered: rf.form.u.clone(),
        resonance_order: cf.resonance.order(),
        l_max: rf.form.l_max,
        hbar_grid: hbars.clone(),
        cutoffs: hbars.iter().map(|h| h * nu_cut).collect(),
        checks,
        coefficients: rows,
        unrecoverable: dg
            .unrecoverable
            .iter()
            .map(|(r, i)| UnrecoverableRow { r: r.clone(), i: *i })
            .collect(),
        warnings: dg.warnings.clone(),
        passed,
    };
    if let Some(out) = &cfg.out {
        io::write_atomic(out, io::recovered_to_json(&rf).as_bytes())?;
    }
    let text = io::to_json(&report);
    emit(stdout, cfg.report.as_ref(), &text)?;
    if cfg.report.is_some() {
        say(stdout, &format!("max coefficient error {max_err:e}; {}", if passed { "pass" } else { "FAIL" }))?;
    }
    if !passed {
        return Err(Error::numerical("round trip missed its tolerances (see report)"));
    }
    Ok(())
}
