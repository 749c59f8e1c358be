use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coeff::Coeff;
use super::index::MultiIndex;
use crate::error::{Error, Result};

/// Coordinate system of a symbol: real `(x, ξ)` or complex `(z, z̄)` with
/// `z = x + iξ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Real,
    Complex,
}

/// Monomial `x^α ξ^β ℏ^j` (real basis) or `z^α z̄^β ℏ^j` (complex basis).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub hbar: u32,
}

impl Monomial {
    pub fn new(alpha: impl Into<MultiIndex>, beta: impl Into<MultiIndex>, hbar: u32) -> Self {
        Monomial {
            alpha: alpha.into(),
            beta: beta.into(),
            hbar,
        }
    }

    pub fn constant(n: usize) -> Self {
        Monomial::new(MultiIndex::zeros(n), MultiIndex::zeros(n), 0)
    }

    /// Grading `|α| + |β| + 2j`.
    pub fn degree(&self) -> u32 {
        self.alpha.order() + self.beta.order() + 2 * self.hbar
    }

    /// Polynomial degree in the phase-space variables, `|α| + |β|`.
    pub fn phase_degree(&self) -> u32 {
        self.alpha.order() + self.beta.order()
    }

    pub fn swapped(&self) -> Monomial {
        Monomial::new(self.beta.clone(), self.alpha.clone(), self.hbar)
    }
}

/// A point `(x, ξ)` of phase space.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, xi: Vec<f64>) -> Self {
        PhasePoint { x, xi }
    }

    pub fn origin(n: usize) -> Self {
        PhasePoint::new(vec![0.0; n], vec![0.0; n])
    }
}

/// Sparse graded polynomial on `T*ℝⁿ` with an `ℏ` variable.
///
/// Every stored monomial has degree `≤ degree_cap` and a nonzero
/// coefficient; all products truncate at the cap.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<C> {
    n: usize,
    basis: Basis,
    degree_cap: u32,
    terms: BTreeMap<Monomial, C>,
}

/// Floating-point symbols, the working type of the crate.
pub type GradedPolynomial = Poly<Complex64>;

impl<C: Coeff> Poly<C> {
    pub fn zero(n: usize, basis: Basis, degree_cap: u32) -> Self {
        Poly {
            n,
            basis,
            degree_cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize, basis: Basis, degree_cap: u32) -> Self {
        Self::monomial(n, basis, degree_cap, Monomial::constant(n), C::one())
    }

    pub fn monomial(n: usize, basis: Basis, degree_cap: u32, m: Monomial, c: C) -> Self {
        let mut p = Self::zero(n, basis, degree_cap);
        p.add_term(m, c);
        p
    }

    /// Builds a polynomial from terms, rejecting any above the cap.
    pub fn from_terms(
        n: usize,
        basis: Basis,
        degree_cap: u32,
        terms: impl IntoIterator<Item = (Monomial, C)>,
    ) -> Result<Self> {
        let mut p = Self::zero(n, basis, degree_cap);
        for (idx, (m, c)) in terms.into_iter().enumerate() {
            if m.alpha.len() != n {
                return Err(Error::validation(
                    format!("terms[{idx}].alpha"),
                    format!("expected {n} entries, found {}", m.alpha.len()),
                ));
            }
            if m.beta.len() != n {
                return Err(Error::validation(
                    format!("terms[{idx}].beta"),
                    format!("expected {n} entries, found {}", m.beta.len()),
                ));
            }
            if m.degree() > degree_cap {
                return Err(Error::validation(
                    format!("terms[{idx}]"),
                    format!("degree {} exceeds degree_cap {degree_cap}", m.degree()),
                ));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Highest degree present, `None` for the zero polynomial.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Adds `c·m`, dropping it silently when its degree exceeds the cap.
    pub fn add_term(&mut self, m: Monomial, c: C) {
        if m.degree() > self.degree_cap || c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&m) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn with_cap(&self, degree_cap: u32) -> Self {
        let mut p = Self::zero(self.n, self.basis, degree_cap);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    pub fn same_space(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::validation(
                "n",
                format!("dimension mismatch: {} vs {}", self.n, other.n),
            ));
        }
        if self.basis != other.basis {
            return Err(Error::validation(
                "basis",
                format!("basis mismatch: {:?} vs {:?}", self.basis, other.basis),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let mut out = self.with_cap(self.degree_cap.min(other.degree_cap));
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-C::one()))
    }

    pub fn scale(&self, s: C) -> Self {
        let mut out = Self::zero(self.n, self.basis, self.degree_cap);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone() * s.clone());
        }
        out
    }

    /// `ℏ^k · self`.
    pub fn times_hbar(&self, k: u32) -> Self {
        let mut out = Self::zero(self.n, self.basis, self.degree_cap);
        for (m, c) in &self.terms {
            let mut m = m.clone();
            m.hbar += k;
            out.add_term(m, c.clone());
        }
        out
    }

    /// Terms of degree exactly `m`.
    pub fn homogeneous_part(&self, degree: u32) -> Self {
        self.filter(|m, _| m.degree() == degree)
    }

    pub fn filter(&self, mut keep: impl FnMut(&Monomial, &C) -> bool) -> Self {
        let mut out = Self::zero(self.n, self.basis, self.degree_cap);
        for (m, c) in &self.terms {
            if keep(m, c) {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Splits into homogeneous parts; entry `m` holds the degree-`m` terms.
    pub fn grade_decompose(&self) -> Vec<Self> {
        let mut parts: Vec<Self> = (0..=self.degree_cap)
            .map(|_| Self::zero(self.n, self.basis, self.degree_cap))
            .collect();
        for (m, c) in &self.terms {
            parts[m.degree() as usize].terms.insert(m.clone(), c.clone());
        }
        parts
    }

    /// Ordinary (pointwise, commutative) product, truncated at the cap.
    pub fn mul_commutative(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let cap = self.degree_cap.min(other.degree_cap);
        let mut out = Self::zero(self.n, self.basis, cap);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma.degree() + mb.degree() > cap {
                    continue;
                }
                let m = Monomial {
                    alpha: ma.alpha.add(&mb.alpha),
                    beta: ma.beta.add(&mb.beta),
                    hbar: ma.hbar + mb.hbar,
                };
                out.add_term(m, ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    /// Replaces every coefficient `c` of monomial `m` by `f(m, c)`.
    pub fn map_coeffs(&self, mut f: impl FnMut(&Monomial, &C) -> C) -> Self {
        let mut out = Self::zero(self.n, self.basis, self.degree_cap);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(m, c));
        }
        out
    }
}

impl GradedPolynomial {
    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops coefficients with modulus `≤ tol`.
    pub fn prune(&self, tol: f64) -> Self {
        self.filter(|_, c| c.norm() > tol)
    }

    /// Maximum coefficient-wise distance to `other`.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for (m, c) in &self.terms {
            d = d.max((c - other.coeff(m)).norm());
        }
        for (m, c) in &other.terms {
            if !self.terms.contains_key(m) {
                d = d.max(c.norm());
            }
        }
        d
    }

    /// Checks the reality condition of a self-adjoint symbol: real
    /// coefficients in the real basis, `c(α,β,j) = conj c(β,α,j)` in the
    /// complex basis.
    pub fn is_real_symbol(&self, tol: f64) -> bool {
        let scale = self.max_abs().max(1.0);
        match self.basis {
            Basis::Real => self.terms.values().all(|c| c.im.abs() <= tol * scale),
            Basis::Complex => self
                .terms
                .iter()
                .all(|(m, c)| (c - self.coeff(&m.swapped()).conj()).norm() <= tol * scale),
        }
    }

    /// Numeric value at a phase-space point. Real basis only.
    pub fn evaluate(&self, p: &PhasePoint, hbar: f64) -> Result<Complex64> {
        if self.basis != Basis::Real {
            return Err(Error::validation("basis", "evaluate needs the real basis"));
        }
        if p.x.len() != self.n || p.xi.len() != self.n {
            return Err(Error::validation(
                "point",
                format!("expected {} coordinates per component", self.n),
            ));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let v = m.alpha.pow(&p.x) * m.beta.pow(&p.xi) * hbar.powi(m.hbar as i32);
            acc += c * v;
        }
        Ok(acc)
    }
}
