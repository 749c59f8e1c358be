use num_complex::Complex64;

use super::resonance::{FrequencyVector, ResonanceSpec};
use crate::error::{Error, Result};
use crate::symbol::{moyal_bracket, Basis, GradedPolynomial};

/// Splits a complex-basis symbol into the kernel of `ad_{H₂}` (monomials
/// with `u·(α−β) = 0`) and its complement.
pub fn resonant_projector(
    a: &GradedPolynomial,
    spec: &ResonanceSpec,
) -> Result<(GradedPolynomial, GradedPolynomial)> {
    if a.basis() != Basis::Complex {
        return Err(Error::validation("basis", "resonant projector needs the complex basis"));
    }
    let kernel = a.filter(|m, _| spec.annihilates(&m.alpha.diff(&m.beta)));
    let image = a.filter(|m, _| !spec.annihilates(&m.alpha.diff(&m.beta)));
    Ok((kernel, image))
}

/// Solves `{H₂, W}_M = R` monomial by monomial: the bracket acts on
/// `z^α z̄^β ħ^j` by the eigenvalue `i u·(α−β)`.
pub fn homological_solve(
    r_image: &GradedPolynomial,
    u: &FrequencyVector,
    spec: &ResonanceSpec,
    small_divisor_floor: f64,
) -> Result<GradedPolynomial> {
    if r_image.basis() != Basis::Complex {
        return Err(Error::validation("basis", "homological equation is solved in the complex basis"));
    }
    let mut w = GradedPolynomial::zero(r_image.n(), Basis::Complex, r_image.degree_cap());
    for (m, c) in r_image.terms() {
        let delta = m.alpha.diff(&m.beta);
        if spec.annihilates(&delta) {
            return Err(Error::validation(
                "R_image",
                format!("monomial with α−β = {delta:?} lies in the kernel"),
            ));
        }
        let divisor = u.dot(&delta);
        if divisor.abs() < small_divisor_floor {
            return Err(Error::SmallDivisor {
                combination: delta,
                divisor,
            });
        }
        w.add_term(m.clone(), c / Complex64::new(0.0, divisor));
    }
    Ok(w)
}

/// `exp(ad_W) H = H + {W,H}_M + ½{W,{W,H}_M}_M + …`, truncated at the cap.
pub fn apply_lie_transform(h: &GradedPolynomial, w: &GradedPolynomial) -> Result<GradedPolynomial> {
    h.same_space(w)?;
    if w.is_zero() {
        return Ok(h.clone());
    }
    let degrees: Vec<u32> = w.terms().map(|(m, _)| m.degree()).collect();
    let m = degrees[0];
    if degrees.iter().any(|&d| d != m) {
        return Err(Error::validation("W", "generator must be homogeneous"));
    }
    if m <= 2 {
        return Err(Error::validation(
            "W",
            format!("generator of degree {m} would change the quadratic part"),
        ));
    }
    let mut out = h.clone();
    let mut term = h.clone();
    let mut k = 1.0;
    loop {
        term = moyal_bracket(w, &term)?.scale(Complex64::new(1.0 / k, 0.0));
        if term.is_zero() {
            break;
        }
        out = out.add(&term)?;
        k += 1.0;
    }
    Ok(out)
}
