use std::collections::BTreeMap;

use super::resonance::ResonanceSpec;
use crate::error::{Error, Result};
use crate::symbol::{Basis, GradedPolynomial, MultiIndex};

/// Key of a canonical-form coefficient: `(r, i)` for `c_{r,i} ħ^i p^r`.
pub type CoeffKey = (MultiIndex, u32);

/// Birkhoff canonical form `H₂ + F(p, ħ)` with
/// `F = Σ c_{r,i} p^r ħ^i` understood through the functional calculus of
/// the actions `P̂_i`, so that `F` has eigenvalue `F(ħ(k+½), ħ)` on `|k⟩`.
///
/// Coefficients are graded by the stage `ℓ = |r| − 1 + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalForm {
    pub n: usize,
    pub u: Vec<f64>,
    pub resonance: ResonanceSpec,
    pub l_max: u32,
    pub coeffs: BTreeMap<CoeffKey, f64>,
}

/// Stage of a coefficient; negative only for `r = 0, i = 0`.
pub fn stage(r: &MultiIndex, i: u32) -> i64 {
    r.order() as i64 - 1 + i as i64
}

impl CanonicalForm {
    pub fn harmonic(u: Vec<f64>, resonance: ResonanceSpec, l_max: u32) -> Self {
        CanonicalForm {
            n: u.len(),
            u,
            resonance,
            l_max,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn coeff(&self, r: &MultiIndex, i: u32) -> f64 {
        self.coeffs.get(&(r.clone(), i)).copied().unwrap_or(0.0)
    }

    /// `F(ħ(k+½), ħ)`, the shift of level `k` away from `ħ u·(k+½)`.
    pub fn shift(&self, k: &MultiIndex, hbar: f64) -> f64 {
        let y: Vec<f64> = k.iter().map(|&e| e as f64 + 0.5).collect();
        self.coeffs
            .iter()
            .map(|((r, i), c)| c * hbar.powi((r.order() + i) as i32) * r.pow(&y))
            .sum()
    }

    /// `ħ u·(k+½) + F(ħ(k+½), ħ)`.
    pub fn energy(&self, k: &MultiIndex, hbar: f64) -> f64 {
        hbar * self.nu(k) + self.shift(k, hbar)
    }

    pub fn nu(&self, k: &MultiIndex) -> f64 {
        k.iter().zip(&self.u).map(|(&e, &u)| u * (e as f64 + 0.5)).sum()
    }

    /// Coefficients of stage `ℓ`, as the polynomial
    /// `𝔭_ℓ(y − ½) = Σ_{|r|−1+i=ℓ} c_{r,i} y^r` in `y = x + ½`.
    pub fn stage_coeffs(&self, l: u32) -> BTreeMap<MultiIndex, f64> {
        let mut out = BTreeMap::new();
        for ((r, i), c) in &self.coeffs {
            if stage(r, *i) == l as i64 {
                *out.entry(r.clone()).or_insert(0.0) += c;
            }
        }
        out
    }

    /// Checks the structural constraints: `c_{0,0} = c_{0,1} = 0`,
    /// `c_{r,0} = 0` for `|r| = 1`, real finite coefficients, stage cap.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.u.len() != self.n {
            return Err(Error::validation("u", format!("expected {} frequencies", self.n)));
        }
        for (idx, ((r, i), c)) in self.coeffs.iter().enumerate() {
            let field = format!("coeffs[{idx}]");
            if r.len() != self.n {
                return Err(Error::validation(
                    format!("{field}.r"),
                    format!("expected {} entries, found {}", self.n, r.len()),
                ));
            }
            if !c.is_finite() {
                return Err(Error::validation(format!("{field}.c"), "coefficient is not finite"));
            }
            let l = stage(r, *i);
            if l <= 0 && c.abs() > tol {
                return Err(Error::validation(
                    field.clone(),
                    format!("c_{{{r},{i}}} = {c:e} must vanish (stage {l} is fixed by the quadratic part)"),
                ));
            }
            if l > self.l_max as i64 {
                return Err(Error::validation(
                    field.clone(),
                    format!("stage {l} exceeds L_max {}", self.l_max),
                ));
            }
        }
        Ok(())
    }

    /// Coefficients violating the literal prefactor `ħ^{|r|−1}`, i.e. with
    /// `i < |r| − 1` and nonzero value.
    pub fn strict_violations(&self, tol: f64) -> Vec<(CoeffKey, f64)> {
        self.coeffs
            .iter()
            .filter(|((r, i), c)| (*i as i64) < r.order() as i64 - 1 && c.abs() > tol)
            .map(|(k, c)| (k.clone(), *c))
            .collect()
    }

    /// Largest absolute coefficient difference over the union of keys.
    pub fn max_coeff_diff(&self, other: &CanonicalForm) -> f64 {
        let mut keys: Vec<&CoeffKey> = self.coeffs.keys().chain(other.coeffs.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|(r, i)| (self.coeff(r, *i) - other.coeff(r, *i)).abs())
            .fold(0.0, f64::max)
    }
}

/// Resonant residual `K`: kernel monomials of `ad_{H₂}` with `α ≠ β`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResonantResidual {
    /// Complex-basis Weyl symbol.
    pub k: GradedPolynomial,
    pub d: Option<u32>,
    /// Set when `K` has monomials of degree exactly `d`, which the strict
    /// inequality `degree > d` does not cover.
    pub has_degree_d_terms: bool,
}

impl ResonantResidual {
    pub fn empty(n: usize, degree_cap: u32, d: Option<u32>) -> Self {
        ResonantResidual {
            k: GradedPolynomial::zero(n, Basis::Complex, degree_cap),
            d,
            has_degree_d_terms: false,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.k.is_zero()
    }

    /// Builds a residual and checks every invariant against `spec`.
    pub fn new(k: GradedPolynomial, spec: &ResonanceSpec) -> Result<Self> {
        if k.basis() != Basis::Complex {
            return Err(Error::validation("K.basis", "resonant residual must be in the complex basis"));
        }
        let d = spec.order();
        let mut at_d = false;
        for (idx, (m, _)) in k.terms().enumerate() {
            let delta = m.alpha.diff(&m.beta);
            if delta.iter().all(|&x| x == 0) {
                return Err(Error::validation(
                    format!("K.terms[{idx}]"),
                    "diagonal monomials belong to F, not K",
                ));
            }
            if !spec.annihilates(&delta) {
                return Err(Error::validation(
                    format!("K.terms[{idx}]"),
                    format!("monomial with α−β = {delta:?} does not commute with H₂"),
                ));
            }
            let dd = d.expect("resonant monomial implies a resonant spec");
            if m.degree() < dd {
                return Err(Error::validation(
                    format!("K.terms[{idx}]"),
                    format!("degree {} below resonance order {dd}", m.degree()),
                ));
            }
            at_d |= m.degree() == dd;
        }
        if !k.is_real_symbol(1e-12) {
            return Err(Error::validation("K", "residual is not a real symbol"));
        }
        Ok(ResonantResidual {
            k,
            d,
            has_degree_d_terms: at_d,
        })
    }
}
