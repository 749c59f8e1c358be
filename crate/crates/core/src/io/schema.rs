use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{from_json, to_json};
use crate::error::{Error, Result};
use crate::inverse::{Diagnostics, RecoverableCaps, RecoveredForm};
use crate::normal_form::{CanonicalForm, CoeffKey, ResonanceSpec, ResonantResidual};
use crate::symbol::{Basis, GradedPolynomial, Monomial, MultiIndex};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    alpha: MultiIndex,
    beta: MultiIndex,
    hbar: u32,
    re: f64,
    im: f64,
}

fn is_real(b: &Basis) -> bool {
    *b == Basis::Real
}

fn real_basis() -> Basis {
    Basis::Real
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HamiltonianJson {
    n: usize,
    degree_cap: u32,
    #[serde(default = "real_basis", skip_serializing_if = "is_real")]
    basis: Basis,
    terms: Vec<TermJson>,
}

fn terms_to_json(p: &GradedPolynomial) -> Vec<TermJson> {
    p.terms()
        .map(|(m, c)| TermJson {
            alpha: m.alpha.clone(),
            beta: m.beta.clone(),
            hbar: m.hbar,
            re: c.re,
            im: c.im,
        })
        .collect()
}

fn poly_from_json(n: usize, degree_cap: u32, basis: Basis, terms: Vec<TermJson>) -> Result<GradedPolynomial> {
    if n == 0 {
        return Err(Error::validation("n", "must be at least 1"));
    }
    let mut seen = BTreeSet::new();
    for (idx, t) in terms.iter().enumerate() {
        if !(t.re.is_finite() && t.im.is_finite()) {
            return Err(Error::validation(format!("terms[{idx}]"), "coefficient is not finite"));
        }
        if !seen.insert((t.alpha.clone(), t.beta.clone(), t.hbar)) {
            return Err(Error::validation(format!("terms[{idx}]"), "duplicate monomial"));
        }
    }
    GradedPolynomial::from_terms(
        n,
        basis,
        degree_cap,
        terms
            .into_iter()
            .map(|t| (Monomial::new(t.alpha, t.beta, t.hbar), Complex64::new(t.re, t.im))),
    )
}

pub fn hamiltonian_from_json(text: &str) -> Result<GradedPolynomial> {
    let h: HamiltonianJson = from_json(text)?;
    poly_from_json(h.n, h.degree_cap, h.basis, h.terms)
}

pub fn hamiltonian_to_json(h: &GradedPolynomial) -> String {
    to_json(&HamiltonianJson {
        n: h.n(),
        degree_cap: h.degree_cap(),
        basis: h.basis(),
        terms: terms_to_json(h),
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoeffJson {
    r: MultiIndex,
    i: u32,
    c: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KeyJson {
    r: MultiIndex,
    i: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CanonicalJson {
    n: usize,
    u: Vec<f64>,
    resonance: ResonanceSpec,
    #[serde(rename = "L_max")]
    l_max: u32,
    coeffs: Vec<CoeffJson>,
}

fn coeffs_to_json(coeffs: &BTreeMap<CoeffKey, f64>) -> Vec<CoeffJson> {
    coeffs
        .iter()
        .map(|((r, i), c)| CoeffJson { r: r.clone(), i: *i, c: *c })
        .collect()
}

fn coeffs_from_json(n: usize, field: &str, coeffs: Vec<CoeffJson>) -> Result<BTreeMap<CoeffKey, f64>> {
    let mut out = BTreeMap::new();
    for (idx, c) in coeffs.into_iter().enumerate() {
        if c.r.len() != n {
            return Err(Error::validation(
                format!("{field}[{idx}].r"),
                format!("expected {n} entries, found {}", c.r.len()),
            ));
        }
        if !c.c.is_finite() {
            return Err(Error::validation(format!("{field}[{idx}].c"), "coefficient is not finite"));
        }
        if out.insert((c.r, c.i), c.c).is_some() {
            return Err(Error::validation(format!("{field}[{idx}]"), "duplicate coefficient"));
        }
    }
    Ok(out)
}

fn check_resonance(n: usize, u: &[f64], spec: &ResonanceSpec) -> Result<()> {
    if let ResonanceSpec::Resonant { d, relations, .. } = spec {
        if relations.is_empty() {
            return Err(Error::validation("resonance.relations", "a resonant spec needs at least one relation"));
        }
        let scale = u.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        let mut shortest = u32::MAX;
        for (idx, rel) in relations.iter().enumerate() {
            let field = format!("resonance.relations[{idx}]");
            if rel.len() != n {
                return Err(Error::validation(field, format!("expected {n} entries, found {}", rel.len())));
            }
            let dot: f64 = rel.iter().zip(u).map(|(&a, &x)| a as f64 * x).sum();
            if rel.iter().all(|&a| a == 0) || dot.abs() > 1e-9 * scale {
                return Err(Error::validation(field, format!("{rel:?} is not a relation of u")));
            }
            shortest = shortest.min(rel.iter().map(|a| a.unsigned_abs() as u32).sum());
        }
        if *d < 2 || *d > shortest {
            return Err(Error::validation("resonance.d", format!("order {d} is inconsistent with the relations")));
        }
    }
    Ok(())
}

fn canonical_from_parts(c: CanonicalJson) -> Result<CanonicalForm> {
    if c.n == 0 {
        return Err(Error::validation("n", "must be at least 1"));
    }
    if c.u.len() != c.n {
        return Err(Error::validation("u", format!("expected {} entries, found {}", c.n, c.u.len())));
    }
    if let Some(idx) = c.u.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::validation(format!("u[{idx}]"), "frequencies must be positive"));
    }
    check_resonance(c.n, &c.u, &c.resonance)?;
    let coeffs = coeffs_from_json(c.n, "coeffs", c.coeffs)?;
    let form = CanonicalForm {
        n: c.n,
        u: c.u,
        resonance: c.resonance,
        l_max: c.l_max,
        coeffs,
    };
    form.validate(0.0)?;
    Ok(form)
}

fn canonical_parts(cf: &CanonicalForm) -> CanonicalJson {
    CanonicalJson {
        n: cf.n,
        u: cf.u.clone(),
        resonance: cf.resonance.clone(),
        l_max: cf.l_max,
        coeffs: coeffs_to_json(&cf.coeffs),
    }
}

pub fn canonical_from_json(text: &str) -> Result<CanonicalForm> {
    canonical_from_parts(from_json(text)?)
}

pub fn canonical_to_json(cf: &CanonicalForm) -> String {
    to_json(&canonical_parts(cf))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResidualJson {
    d: Option<u32>,
    n: usize,
    degree_cap: u32,
    terms: Vec<TermJson>,
}

/// Loads `K` (complex basis) and checks it against the canonical form's
/// resonance.
pub fn residual_from_json(text: &str, spec: &ResonanceSpec) -> Result<ResonantResidual> {
    let r: ResidualJson = from_json(text)?;
    if r.d != spec.order() {
        return Err(Error::validation(
            "d",
            format!("residual has order {:?} but the canonical form has {:?}", r.d, spec.order()),
        ));
    }
    let k = poly_from_json(r.n, r.degree_cap, Basis::Complex, r.terms)?;
    ResonantResidual::new(k, spec)
}

pub fn residual_to_json(k: &ResonantResidual) -> String {
    to_json(&ResidualJson {
        d: k.d,
        n: k.k.n(),
        degree_cap: k.k.degree_cap(),
        terms: terms_to_json(&k.k),
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CapsJson {
    d: u32,
    degree_cap: u32,
    top_degree_excluded: bool,
    stage_limit: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagnosticsJson {
    residuals: BTreeMap<String, f64>,
    cond: BTreeMap<String, f64>,
    #[serde(default)]
    rank: BTreeMap<String, usize>,
    unrecoverable: Vec<KeyJson>,
    hbar_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    caps: Option<CapsJson>,
    #[serde(default)]
    constraints: Vec<CoeffJson>,
    #[serde(default)]
    warnings: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecoveredJson {
    n: usize,
    u: Vec<f64>,
    resonance: ResonanceSpec,
    #[serde(rename = "L_max")]
    l_max: u32,
    coeffs: Vec<CoeffJson>,
    diagnostics: DiagnosticsJson,
}

pub fn recovered_to_json(rf: &RecoveredForm) -> String {
    let c = canonical_parts(&rf.form);
    let dg = &rf.diagnostics;
    to_json(&RecoveredJson {
        n: c.n,
        u: c.u,
        resonance: c.resonance,
        l_max: c.l_max,
        coeffs: c.coeffs,
        diagnostics: DiagnosticsJson {
            residuals: dg.residuals.clone(),
            cond: dg.cond.clone(),
            rank: dg.rank.clone(),
            unrecoverable: dg
                .unrecoverable
                .iter()
                .map(|(r, i)| KeyJson { r: r.clone(), i: *i })
                .collect(),
            hbar_grid: dg.hbar_grid.clone(),
            caps: dg.caps.as_ref().map(|c| CapsJson {
                d: c.d,
                degree_cap: c.degree_cap,
                top_degree_excluded: c.top_degree_excluded,
                stage_limit: c.stage_limit,
            }),
            constraints: coeffs_to_json(&dg.constraints),
            warnings: dg.warnings.clone(),
        },
    })
}

pub fn recovered_from_json(text: &str) -> Result<RecoveredForm> {
    let r: RecoveredJson = from_json(text)?;
    let n = r.n;
    let form = canonical_from_parts(CanonicalJson {
        n,
        u: r.u,
        resonance: r.resonance,
        l_max: r.l_max,
        coeffs: r.coeffs,
    })?;
    let d = r.diagnostics;
    let mut unrecoverable = Vec::with_capacity(d.unrecoverable.len());
    for (idx, k) in d.unrecoverable.into_iter().enumerate() {
        if k.r.len() != n {
            return Err(Error::validation(
                format!("diagnostics.unrecoverable[{idx}].r"),
                format!("expected {n} entries, found {}", k.r.len()),
            ));
        }
        unrecoverable.push((k.r, k.i));
    }
    Ok(RecoveredForm {
        form,
        diagnostics: Diagnostics {
            residuals: d.residuals,
            cond: d.cond,
            rank: d.rank,
            unrecoverable,
            hbar_grid: d.hbar_grid,
            caps: d.caps.map(|c| RecoverableCaps {
                d: c.d,
                degree_cap: c.degree_cap,
                top_degree_excluded: c.top_degree_excluded,
                stage_limit: c.stage_limit,
            }),
            constraints: coeffs_from_json(n, "diagnostics.constraints", d.constraints)?,
            warnings: d.warnings,
        },
    })
}

/// Truncated trace together with its small-ħ expansion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceRecord {
    pub t_re: f64,
    pub t_im: f64,
    pub eps: f64,
    pub value_re: f64,
    pub value_im: f64,
    pub tail_bound: f64,
    pub hbar: f64,
    pub zelditch_order: u32,
    pub zelditch_re: f64,
    pub zelditch_im: f64,
}
