use std::collections::BTreeMap;

use num_complex::Complex64;

use super::canonical::{stage, CanonicalForm, CoeffKey, ResonantResidual};
use super::homological::{apply_lie_transform, homological_solve, resonant_projector};
use super::resonance::{FrequencyVector, ResonanceSpec};
use crate::error::{Error, Result};
use crate::symbol::{change_coordinates, harmonic, weyl_to_normal, Basis, GradedPolynomial, MultiIndex};

#[derive(Clone, Debug, PartialEq)]
pub struct NormalizeOptions {
    /// Highest stage kept; defaults to the largest the degree cap supports.
    pub l_max: Option<u32>,
    /// Defaults to `1e-8·max(u)`.
    pub small_divisor_floor: Option<f64>,
    /// Relative tolerance for the quadratic-part precondition.
    pub quadratic_tol: f64,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions {
            l_max: None,
            small_divisor_floor: None,
            quadratic_tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NormalForm {
    pub canonical: CanonicalForm,
    pub residual: ResonantResidual,
    /// Generators `W_m`, one per degree `m = 3..=cap`, in the order applied.
    pub transforms: Vec<GradedPolynomial>,
    /// Full normalised symbol `H₂ + F + K` (complex basis, Weyl symbol).
    pub h_can: GradedPolynomial,
}

/// Largest stage a degree cap can resolve: stage `ℓ` lives in degree `2(ℓ+1)`.
pub fn max_stage_for_cap(cap: u32) -> u32 {
    (cap / 2).saturating_sub(1)
}

/// Reads `u` off the quadratic part of a jet (either basis).
pub fn frequencies_from_jet(h: &GradedPolynomial) -> Result<Vec<f64>> {
    let hc = change_coordinates(h, Basis::Complex);
    let n = h.n();
    (0..n)
        .map(|i| {
            let m = crate::symbol::Monomial::new(MultiIndex::unit(n, i), MultiIndex::unit(n, i), 0);
            let c = hc.coeff(&m);
            if c.re > 0.0 && c.im.abs() < 1e-14 {
                Ok(2.0 * c.re)
            } else {
                Err(Error::validation(
                    "hamiltonian",
                    format!("quadratic part has no positive frequency in direction {i}"),
                ))
            }
        })
        .collect()
}

fn check_preconditions(hc: &GradedPolynomial, u: &FrequencyVector, tol: f64) -> Result<()> {
    let parts = hc.grade_decompose();
    for d in 0..parts.len().min(2) {
        if let Some((m, _)) = parts[d].terms().next() {
            return Err(Error::validation(
                "hamiltonian",
                format!("term of degree {d} present ({m:?}); the minimum must sit at the origin with value 0"),
            ));
        }
    }
    if parts.len() > 2 {
        let h2 = harmonic(&u.u, Basis::Complex, hc.degree_cap());
        let dev = parts[2].distance(&h2);
        if dev > tol * u.max() {
            let sub = parts[2].filter(|m, _| m.hbar == 1);
            if !sub.is_zero() {
                return Err(Error::validation(
                    "hamiltonian",
                    "ħ¹ constant present: the subprincipal symbol must vanish at the minimum",
                ));
            }
            return Err(Error::validation(
                "hamiltonian",
                format!("quadratic part is not Σ u_i/2 (x_i²+ξ_i²) for u = {:?} (deviation {dev:e})", u.u),
            ));
        }
    }
    if !hc.is_real_symbol(1e-12) {
        return Err(Error::validation("hamiltonian", "symbol is not real"));
    }
    Ok(())
}

/// Eigenvalue polynomial of a diagonal kernel symbol, as a table of
/// `c_{r,i}` via `E = Σ c_{r,i} ħ^{|r|+i} (k+½)^r`.
pub fn diagonal_to_coeffs(diag: &GradedPolynomial) -> BTreeMap<CoeffKey, f64> {
    let n = diag.n();
    let normal = weyl_to_normal(diag);
    let mut out: BTreeMap<CoeffKey, f64> = BTreeMap::new();
    for t in &normal.terms {
        debug_assert_eq!(t.lower, t.raise);
        // Π_i 2^{a_i} Π_{m<a_i} (y_i − ½ − m): product of univariate polys.
        let mut poly: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        poly.insert(Vec::new(), 1.0);
        for i in 0..n {
            let a = t.lower.0[i];
            let mut uni = vec![1.0f64];
            for m in 0..a {
                let shift = -0.5 - m as f64;
                let mut next = vec![0.0; uni.len() + 1];
                for (p, c) in uni.iter().enumerate() {
                    next[p + 1] += 2.0 * c;
                    next[p] += 2.0 * shift * c;
                }
                uni = next;
            }
            let mut np = BTreeMap::new();
            for (exps, c) in &poly {
                for (p, uc) in uni.iter().enumerate() {
                    if *uc == 0.0 {
                        continue;
                    }
                    let mut e = exps.clone();
                    e.push(p as u32);
                    *np.entry(e).or_insert(0.0) += c * uc;
                }
            }
            poly = np;
        }
        let hpow = t.hbar + t.lower.order();
        for (exps, q) in poly {
            let r = MultiIndex(exps);
            let i = hpow - r.order();
            *out.entry((r, i)).or_insert(0.0) += q * t.coeff.re;
        }
    }
    out
}

/// Quantum Birkhoff normalisation of a jet up to its degree cap.
pub fn normalize(
    h_jet: &GradedPolynomial,
    u: &FrequencyVector,
    spec: &ResonanceSpec,
    options: &NormalizeOptions,
) -> Result<NormalForm> {
    let n = h_jet.n();
    if u.n() != n {
        return Err(Error::validation("u", format!("expected {n} frequencies, got {}", u.n())));
    }
    let cap = h_jet.degree_cap();
    let l_cap = max_stage_for_cap(cap);
    let l_max = options.l_max.unwrap_or(l_cap);
    if l_max > l_cap {
        return Err(Error::validation(
            "L_max",
            format!("stage {l_max} needs degree cap {}, jet has {cap}", 2 * (l_max + 1)),
        ));
    }
    let floor = options.small_divisor_floor.unwrap_or(1e-8 * u.max());
    let mut h = change_coordinates(h_jet, Basis::Complex);
    check_preconditions(&h, u, options.quadratic_tol)?;

    let mut transforms = Vec::new();
    for m in 3..=cap {
        let part = h.homogeneous_part(m);
        let (kernel, image) = resonant_projector(&part, spec)?;
        let w = homological_solve(&image, u, spec, floor)?;
        if !w.is_zero() {
            h = apply_lie_transform(&h, &w)?;
            // The degree-m part is now the kernel up to rounding; pin it.
            h = h.filter(|mm, _| mm.degree() != m).add(&kernel)?;
        }
        transforms.push(w);
    }

    let h2 = harmonic(&u.u, Basis::Complex, cap);
    let rest = h.sub(&h2)?.filter(|m, _| m.degree() >= 3);
    let diag = rest.filter(|m, _| m.alpha == m.beta);
    let k = rest.filter(|m, _| m.alpha != m.beta);

    let scale = diag.max_abs().max(1.0);
    let coeffs: BTreeMap<CoeffKey, f64> = diagonal_to_coeffs(&diag)
        .into_iter()
        .filter(|((r, i), c)| stage(r, *i) <= l_max as i64 && c.abs() > 1e-15 * scale)
        .collect();
    let canonical = CanonicalForm {
        n,
        u: u.u.clone(),
        resonance: spec.clone(),
        l_max,
        coeffs,
    };
    canonical.validate(1e-12)?;
    let residual = if k.is_zero() {
        ResonantResidual::empty(n, cap, spec.order())
    } else {
        let k = k.prune(1e-15 * k.max_abs().max(1.0));
        ResonantResidual::new(k, spec)?
    };
    if residual.has_degree_d_terms {
        log::warn!(
            "resonant residual keeps monomials of degree exactly d = {:?}",
            residual.d
        );
    }
    Ok(NormalForm {
        canonical,
        residual,
        transforms,
        h_can: h,
    })
}

/// Replays logged generators on a jet (audit of the conjugation).
pub fn replay_transforms(h_jet: &GradedPolynomial, transforms: &[GradedPolynomial]) -> Result<GradedPolynomial> {
    let mut h = change_coordinates(h_jet, Basis::Complex);
    for w in transforms {
        h = apply_lie_transform(&h, w)?;
    }
    Ok(h)
}

/// Rotates `z_j → e^{iφ_j} z_j` (a symplectic change of coordinates).
pub fn rotate_phases(h: &GradedPolynomial, phases: &[f64]) -> GradedPolynomial {
    let basis = h.basis();
    let hc = change_coordinates(h, Basis::Complex);
    let rotated = hc.map_coeffs(|m, c| {
        let angle: f64 = m
            .alpha
            .diff(&m.beta)
            .iter()
            .zip(phases)
            .map(|(&d, &p)| d as f64 * p)
            .sum();
        c * Complex64::from_polar(1.0, angle)
    });
    change_coordinates(&rotated, basis)
}
