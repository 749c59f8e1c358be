use std::collections::BTreeMap;

use super::interpolate::LatticePolynomial;
use crate::error::{Error, Result};
use crate::normal_form::{CanonicalForm, CoeffKey, ResonanceSpec};
use crate::symbol::MultiIndex;

/// Degree limits that apply to a resonant recovery.
#[derive(Clone, Debug, PartialEq)]
pub struct RecoverableCaps {
    pub d: u32,
    /// `[(d−1)/2]`: highest recoverable total degree `|r| + i` of `F`.
    pub degree_cap: u32,
    /// For odd `d` the monomials of degree exactly `degree_cap` are excluded.
    pub top_degree_excluded: bool,
    /// Stages `ℓ < [d/2]` are the only ħ-orders the data determine.
    pub stage_limit: u32,
}

impl RecoverableCaps {
    pub fn for_order(d: u32) -> Self {
        RecoverableCaps {
            d,
            degree_cap: (d - 1) / 2,
            top_degree_excluded: d % 2 == 1,
            stage_limit: d / 2,
        }
    }

    /// Whether `c_{r,i}` lies inside the recoverable range.
    pub fn admits(&self, r: &MultiIndex, i: u32) -> bool {
        let deg = r.order() + i;
        let stage = deg as i64 - 1;
        deg <= self.degree_cap
            && !(self.top_degree_excluded && deg == self.degree_cap)
            && stage < self.stage_limit as i64
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub residuals: BTreeMap<String, f64>,
    pub cond: BTreeMap<String, f64>,
    pub rank: BTreeMap<String, usize>,
    pub unrecoverable: Vec<CoeffKey>,
    pub hbar_grid: Vec<f64>,
    pub caps: Option<RecoverableCaps>,
    /// Fitted values of the coefficients fixed by the quadratic part
    /// (`c_{r,0}`, `|r| = 1`, and `c_{0,1}`); all should vanish.
    pub constraints: BTreeMap<CoeffKey, f64>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveredForm {
    pub form: CanonicalForm,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug)]
pub struct AssembleOptions {
    pub constraint_tol: f64,
    pub paper_strict: bool,
    pub strict_tol: f64,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions {
            constraint_tol: 1e-8,
            paper_strict: false,
            strict_tol: 1e-8,
        }
    }
}

/// Reads `c_{r,i}` off the stage polynomials: the coefficient of `y^r` in
/// `𝔭_ℓ` is `c_{r, ℓ+1−|r|}`.
pub fn assemble_canonical_form(
    stages: &[LatticePolynomial],
    u: &[f64],
    spec: &ResonanceSpec,
    options: &AssembleOptions,
) -> Result<RecoveredForm> {
    let n = u.len();
    let mut coeffs = BTreeMap::new();
    let mut diagnostics = Diagnostics::default();
    let mut l_max = 0;
    for p in stages {
        if p.n != n {
            return Err(Error::validation(format!("stage[{}]", p.l), "dimension mismatch"));
        }
        l_max = l_max.max(p.l);
        for (r, &c) in &p.coeffs {
            if r.order() > p.l + 1 {
                return Err(Error::validation(
                    format!("stage[{}]", p.l),
                    format!("monomial y^{r} exceeds the degree bound ℓ+1 = {}", p.l + 1),
                ));
            }
            let i = p.l + 1 - r.order();
            let key = (r.clone(), i);
            if p.l == 0 {
                diagnostics.constraints.insert(key, c);
                continue;
            }
            if c != 0.0 {
                *coeffs.entry(key).or_insert(0.0) += c;
            }
        }
    }
    let worst = diagnostics.constraints.values().map(|c| c.abs()).fold(0.0, f64::max);
    diagnostics.residuals.insert("constraint".into(), worst);
    for ((r, i), c) in &diagnostics.constraints {
        if c.abs() > options.constraint_tol {
            diagnostics.warnings.push(format!(
                "c_{{{r},{i}}} = {c:e} should vanish (fixed by the quadratic part); left out of the form"
            ));
        }
    }
    let form = CanonicalForm {
        n,
        u: u.to_vec(),
        resonance: spec.clone(),
        l_max,
        coeffs,
    };
    if options.paper_strict {
        for ((r, i), c) in form.strict_violations(options.strict_tol) {
            diagnostics.warnings.push(format!(
                "c_{{{r},{i}}} = {c:e} has i < |r| − 1, outside the ħ^{{|r|−1}} prefactor of the canonical-form expansion"
            ));
        }
    }
    for w in &diagnostics.warnings {
        log::warn!("{w}");
    }
    Ok(RecoveredForm { form, diagnostics })
}
