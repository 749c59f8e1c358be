//! Weyl symbols as normal-ordered ladder polynomials, and their matrix
//! elements in the Fock basis.
//!
//! Conventions: `ẑ = x̂ + iξ̂ = √2 â` with `[â, â†] = ℏ` and
//! `â|k⟩ = √(ℏk)|k−1⟩`; hence `ẑ` lowers, `ẑ† = Op(z̄)` raises, and the
//! Weyl symbol `z z̄ = x² + ξ²` quantises to `2â†â + ℏ`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::coords::change_coordinates;
use super::index::MultiIndex;
use super::poly::{Basis, GradedPolynomial, Monomial, Poly};
use super::star::star_product;

/// One normal-ordered term `coeff · ℏ^hbar · (ẑ†)^raise ẑ^lower`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalTerm {
    pub lower: MultiIndex,
    pub raise: MultiIndex,
    pub hbar: u32,
    pub coeff: Complex64,
}

/// Operator given as a sum of normal-ordered ladder monomials.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalOrdered {
    pub n: usize,
    pub terms: Vec<NormalTerm>,
}

/// Weyl symbol of `(ẑ†)^β ẑ^α`, i.e. `z̄^{⋆β} ⋆ z^{⋆α}`.
fn normal_symbol(n: usize, alpha: &MultiIndex, beta: &MultiIndex) -> GradedPolynomial {
    let cap = alpha.order() + beta.order();
    let one = Complex64::new(1.0, 0.0);
    let mut acc = Poly::one(n, Basis::Complex, cap);
    for i in 0..n {
        let zbar = Poly::monomial(
            n,
            Basis::Complex,
            cap,
            Monomial::new(MultiIndex::zeros(n), MultiIndex::unit(n, i), 0),
            one,
        );
        for _ in 0..beta.0[i] {
            acc = star_product(&acc, &zbar).expect("same space");
        }
    }
    for i in 0..n {
        let z = Poly::monomial(
            n,
            Basis::Complex,
            cap,
            Monomial::new(MultiIndex::unit(n, i), MultiIndex::zeros(n), 0),
            one,
        );
        for _ in 0..alpha.0[i] {
            acc = star_product(&acc, &z).expect("same space");
        }
    }
    acc
}

/// Rewrites a Weyl symbol as a normal-ordered operator by triangular
/// elimination: the leading phase-space monomial `z^α z̄^β` is matched by
/// `(ẑ†)^β ẑ^α`, whose symbol differs only in lower phase-space degree.
pub fn weyl_to_normal(symbol: &GradedPolynomial) -> NormalOrdered {
    let n = symbol.n();
    let mut rest = change_coordinates(symbol, Basis::Complex);
    let mut cache: BTreeMap<(MultiIndex, MultiIndex), GradedPolynomial> = BTreeMap::new();
    let mut terms = Vec::new();
    let scale = rest.max_abs().max(1e-300);
    while let Some((lead, c)) = rest
        .terms()
        .max_by(|(a, _), (b, _)| {
            a.phase_degree()
                .cmp(&b.phase_degree())
                .then_with(|| b.cmp(a))
        })
        .map(|(m, c)| (m.clone(), *c))
    {
        if c.norm() <= 1e-15 * scale {
            rest = rest.filter(|m, _| *m != lead);
            continue;
        }
        let key = (lead.alpha.clone(), lead.beta.clone());
        let sym = cache
            .entry(key)
            .or_insert_with(|| normal_symbol(n, &lead.alpha, &lead.beta))
            .clone();
        let shifted = sym.with_cap(rest.degree_cap()).times_hbar(lead.hbar).scale(c);
        rest = rest.sub(&shifted).expect("same space");
        // Exact cancellation of the leading monomial.
        rest = rest.filter(|m, _| *m != lead);
        terms.push(NormalTerm {
            lower: lead.alpha,
            raise: lead.beta,
            hbar: lead.hbar,
            coeff: c,
        });
    }
    NormalOrdered { n, terms }
}

impl NormalOrdered {
    /// `⟨k'| Ô |k⟩` where `k'` is determined by each term; returns all
    /// nonzero `(k', value)` pairs, summed per target state.
    pub fn apply(&self, k: &MultiIndex, hbar: f64) -> BTreeMap<MultiIndex, Complex64> {
        let mut out: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for t in &self.terms {
            if let Some((target, amp)) = ladder_element(&t.lower, &t.raise, k, hbar) {
                *out.entry(target).or_insert(Complex64::new(0.0, 0.0)) +=
                    t.coeff * hbar.powi(t.hbar as i32) * amp;
            }
        }
        out.retain(|_, v| v.norm() != 0.0);
        out
    }

    /// Diagonal element `⟨k|Ô|k⟩`.
    pub fn diagonal(&self, k: &MultiIndex, hbar: f64) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| t.lower == t.raise)
            .filter_map(|t| {
                ladder_element(&t.lower, &t.raise, k, hbar)
                    .map(|(_, amp)| t.coeff * hbar.powi(t.hbar as i32) * amp)
            })
            .sum()
    }
}

/// Matrix element of `(ẑ†)^raise ẑ^lower` on `|k⟩`.
pub fn ladder_element(
    lower: &MultiIndex,
    raise: &MultiIndex,
    k: &MultiIndex,
    hbar: f64,
) -> Option<(MultiIndex, f64)> {
    let mut amp = 1.0;
    let mut target = Vec::with_capacity(k.len());
    for i in 0..k.len() {
        let (a, b, ki) = (lower.0[i], raise.0[i], k.0[i]);
        if a > ki {
            return None;
        }
        let mid = ki - a;
        // ẑ^a: Π √(2ℏ(ki−m)), then (ẑ†)^b: Π √(2ℏ(mid+m+1))
        let mut prod = 1.0;
        for m in 0..a {
            prod *= 2.0 * hbar * (ki - m) as f64;
        }
        for m in 0..b {
            prod *= 2.0 * hbar * (mid + m + 1) as f64;
        }
        amp *= prod.sqrt();
        target.push(mid + b);
    }
    Some((MultiIndex(target), amp))
}
