use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::assemble::{assemble_canonical_form, AssembleOptions, RecoverableCaps, RecoveredForm};
use super::frequencies::{recover_frequencies, FrequencyOptions};
use super::interpolate::{interpolate_polynomial, LatticePolynomial};
use super::labeling::{label_lattice, LabeledSample};
use super::series::{fit_hbar_series, SeriesFit};
use crate::error::{Error, Result};
use crate::linalg::{identifiable_columns, least_squares, min_norm_least_squares, LeastSquares, COND_CAP};
use crate::normal_form::{resonance_order, FrequencyVector, ResonanceSpec};
use crate::spectral::{Label, SpectrumSample};
use crate::symbol::{indices_up_to, MultiIndex};

/// Relative eigenvalue floor separating blind directions of a cluster-sum fit.
const IDENTIFIABILITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct RecoverOptions {
    pub l_max: u32,
    /// Dimension; inferred from the labels or the frequencies when absent.
    pub n: Option<usize>,
    /// Skips frequency estimation.
    pub frequencies: Option<Vec<f64>>,
    pub frequency: FrequencyOptions,
    pub resonance_bound: u32,
    pub detection_tol: f64,
    pub cond_cap: f64,
    pub assemble: AssembleOptions,
    /// Resonant case: fit every stage up to `l_max` from cluster sums
    /// instead of stopping at the recoverable caps.
    pub cluster_sum_extension: bool,
}

impl Default for RecoverOptions {
    fn default() -> Self {
        RecoverOptions {
            l_max: 3,
            n: None,
            frequencies: None,
            frequency: FrequencyOptions::default(),
            resonance_bound: 10,
            detection_tol: 1e-9,
            cond_cap: COND_CAP,
            assemble: AssembleOptions::default(),
            cluster_sum_extension: false,
        }
    }
}

fn infer_dimension(samples: &[SpectrumSample], options: &RecoverOptions) -> Result<usize> {
    if let Some(n) = options.n {
        return Ok(n);
    }
    if let Some(u) = &options.frequencies {
        return Ok(u.len());
    }
    for s in samples {
        for e in &s.entries {
            match &e.label {
                Some(Label::Point(k)) => return Ok(k.len()),
                Some(Label::Cluster(ks)) if !ks.is_empty() => return Ok(ks[0].len()),
                _ => {}
            }
        }
    }
    Err(Error::validation(
        "spectra",
        "cannot infer the dimension: supply labeled spectra or the frequencies",
    ))
}

/// Per-group ħ-series fits over every sample; a group missing from any
/// sample is reported as insufficient coverage when it is required.
struct GroupFits {
    fits: BTreeMap<Vec<MultiIndex>, SeriesFit>,
}

fn fit_groups(
    labeled: &[LabeledSample],
    required: &[Vec<MultiIndex>],
    optional: bool,
    l_max: u32,
    cond_cap: f64,
) -> Result<GroupFits> {
    let hbars: Vec<f64> = labeled.iter().map(|s| s.hbar).collect();
    let mut fits = BTreeMap::new();
    for members in required {
        let mut vals = Vec::with_capacity(labeled.len());
        for s in labeled {
            match s.find(members) {
                Some(g) => vals.push(g.residual(s.hbar)),
                None => {
                    if optional {
                        break;
                    }
                    let names: Vec<String> = members.iter().map(|k| k.dash_label()).collect();
                    return Err(Error::validation(
                        "cutoff",
                        format!(
                            "insufficient lattice coverage for requested order: level {} missing at ħ = {}; raise the cutoff",
                            names.join("|"),
                            s.hbar
                        ),
                    ));
                }
            }
        }
        if vals.len() < labeled.len() {
            continue;
        }
        fits.insert(members.clone(), fit_hbar_series(&hbars, &vals, l_max, cond_cap)?);
    }
    Ok(GroupFits { fits })
}

/// Full inverse pipeline from spectra at several ħ to a canonical form.
pub fn recover(samples: &[SpectrumSample], options: &RecoverOptions) -> Result<RecoveredForm> {
    if samples.len() < 2 {
        return Err(Error::validation("spectra", "need spectra at two or more values of ħ"));
    }
    for (i, s) in samples.iter().enumerate() {
        s.validate().map_err(|e| match e {
            Error::Validation { field, message } => Error::validation(format!("spectra[{i}].{field}"), message),
            other => other,
        })?;
    }
    let n = infer_dimension(samples, options)?;
    let u = match &options.frequencies {
        Some(u) => {
            if u.len() != n {
                return Err(Error::validation("frequencies", format!("expected {n} values")));
            }
            u.clone()
        }
        None => recover_frequencies(samples, n, &options.frequency)?.u,
    };
    let freq = FrequencyVector::with_settings(u.clone(), vec![], options.resonance_bound, options.detection_tol)?;
    let spec = resonance_order(&freq)?;
    let labeled: Vec<LabeledSample> = samples
        .iter()
        .map(|s| label_lattice(s, &u, &spec))
        .collect::<Result<_>>()?;
    let hbar_grid: Vec<f64> = samples.iter().map(|s| s.hbar).collect();

    let mut rf = match spec.order() {
        None => recover_non_resonant(&labeled, &u, &spec, options)?,
        Some(d) => recover_resonant(&labeled, &u, &spec, d, options)?,
    };
    rf.diagnostics.hbar_grid = hbar_grid;
    Ok(rf)
}

fn recover_non_resonant(
    labeled: &[LabeledSample],
    u: &[f64],
    spec: &ResonanceSpec,
    options: &RecoverOptions,
) -> Result<RecoveredForm> {
    let n = u.len();
    let l_max = options.l_max;
    let points = indices_up_to(n, l_max + 1);
    let groups: Vec<Vec<MultiIndex>> = points.iter().map(|k| vec![k.clone()]).collect();
    let fits = fit_groups(labeled, &groups, false, l_max, options.cond_cap)?;
    let mut stages = Vec::new();
    let mut interp_res = BTreeMap::new();
    for l in 0..=l_max {
        let vals: Vec<(MultiIndex, f64)> = points
            .iter()
            .filter(|k| k.order() <= l + 1)
            .map(|k| {
                let f = &fits.fits[&vec![k.clone()]];
                (k.clone(), if l == 0 { f.v0 } else { f.v[l as usize] })
            })
            .collect();
        let it = interpolate_polynomial(&vals, n, l + 1)?;
        interp_res.insert(format!("interp[{l}]"), it.residual);
        stages.push(LatticePolynomial { l, n, coeffs: it.coeffs });
    }
    let mut rf = assemble_canonical_form(&stages, u, spec, &options.assemble)?;
    rf.form.l_max = l_max;
    let d = &mut rf.diagnostics;
    d.residuals.extend(interp_res);
    let p0 = fits.fits.values().map(|f| f.v0.abs()).fold(0.0, f64::max);
    d.residuals.insert("p0".into(), p0);
    d.residuals.insert("fit".into(), fits.fits.values().map(|f| f.residual).fold(0.0, f64::max));
    d.cond.insert("hbar_fit".into(), fits.fits.values().map(|f| f.cond).fold(0.0, f64::max));
    Ok(rf)
}

fn recover_resonant(
    labeled: &[LabeledSample],
    u: &[f64],
    spec: &ResonanceSpec,
    d: u32,
    options: &RecoverOptions,
) -> Result<RecoveredForm> {
    let n = u.len();
    let l_max = options.l_max;
    let caps = RecoverableCaps::for_order(d);
    let extension = options.cluster_sum_extension;
    // clusters seen in the first sample, in ν order
    let first = &labeled[0];
    let reach = if extension { l_max + 1 } else { (d - 1) / 2 };
    let mut required = Vec::new();
    let mut optional = Vec::new();
    for g in &first.groups {
        let min_order = g.members.iter().map(|k| k.order()).min().unwrap_or(0);
        if 2 * min_order < d {
            required.push(g.members.clone());
        } else if extension && min_order <= reach {
            optional.push(g.members.clone());
        }
    }
    let mut fits = fit_groups(labeled, &required, false, l_max, options.cond_cap)?;
    fits.fits.extend(fit_groups(labeled, &optional, true, l_max, options.cond_cap)?.fits);

    let mut diagnostics_rank = BTreeMap::new();
    let mut diagnostics_cond = BTreeMap::new();
    let mut residuals = BTreeMap::new();
    let mut stages = Vec::new();
    let mut unrecoverable = Vec::new();
    for l in 0..=l_max {
        let monos: Vec<MultiIndex> = indices_up_to(n, l + 1);
        let (model, excluded): (Vec<MultiIndex>, Vec<MultiIndex>) = monos.into_iter().partition(|r| {
            let i = l + 1 - r.order();
            extension || caps.admits(r, i)
        });
        for r in &excluded {
            let i = l + 1 - r.order();
            if caps.top_degree_excluded && r.order() + i == caps.degree_cap && !extension {
                unrecoverable.push((r.clone(), i));
            }
        }
        if model.is_empty() {
            continue;
        }
        let clusters: Vec<(&Vec<MultiIndex>, &SeriesFit)> = fits.fits.iter().collect();
        let design = |model: &[MultiIndex]| {
            DMatrix::from_fn(clusters.len(), model.len(), |row, col| {
                clusters[row]
                    .0
                    .iter()
                    .map(|k| {
                        let y: Vec<f64> = k.iter().map(|&e| e as f64 + 0.5).collect();
                        model[col].pow(&y)
                    })
                    .sum()
            })
        };
        let a = design(&model);
        let b = DVector::from_iterator(
            clusters.len(),
            clusters.iter().map(|(_, f)| if l == 0 { f.v0 } else { f.v[l as usize] }),
        );
        let what = format!("cluster-sum fit at stage {l}");
        let (ls, model) = if extension {
            // cluster sums see only part of the polynomial; keep the coordinates they determine
            let ls = min_norm_least_squares(&a, &b, IDENTIFIABILITY_TOL, &what)?;
            let seen = identifiable_columns(&a, IDENTIFIABILITY_TOL);
            let mut x = Vec::new();
            let mut kept = Vec::new();
            for ((r, s), v) in model.into_iter().zip(seen).zip(ls.x.iter()) {
                if s {
                    kept.push(r);
                    x.push(*v);
                } else {
                    unrecoverable.push((r.clone(), l + 1 - r.order()));
                }
            }
            (LeastSquares { x: DVector::from_vec(x), ..ls }, kept)
        } else {
            (least_squares(&a, &b, options.cond_cap, &what)?, model)
        };
        diagnostics_rank.insert(format!("stage[{l}]"), ls.rank);
        diagnostics_cond.insert(format!("stage[{l}]"), ls.cond);
        residuals.insert(format!("cluster_fit[{l}]"), ls.residual);
        stages.push(LatticePolynomial {
            l,
            n,
            coeffs: model.into_iter().zip(ls.x.iter().copied()).collect(),
        });
    }
    let mut rf = assemble_canonical_form(&stages, u, spec, &options.assemble)?;
    rf.form.l_max = if extension { l_max } else { l_max.min(caps.stage_limit.saturating_sub(1)) };
    let dg = &mut rf.diagnostics;
    dg.rank = diagnostics_rank;
    dg.cond = diagnostics_cond;
    dg.cond.insert("hbar_fit".into(), fits.fits.values().map(|f| f.cond).fold(0.0, f64::max));
    dg.residuals.extend(residuals);
    dg.residuals.insert("p0".into(), fits.fits.values().map(|f| f.v0.abs()).fold(0.0, f64::max));
    dg.residuals.insert("fit".into(), fits.fits.values().map(|f| f.residual).fold(0.0, f64::max));
    unrecoverable.sort();
    unrecoverable.dedup();
    dg.unrecoverable = unrecoverable;
    dg.caps = Some(caps);
    Ok(rf)
}
