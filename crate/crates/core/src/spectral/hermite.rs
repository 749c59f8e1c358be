use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::sample::{Source, SpectrumSample};
use crate::error::{Error, Result};
use crate::symbol::{change_coordinates, indices_up_to, weyl_to_normal, Basis, GradedPolynomial, MultiIndex};

/// Largest Fock-space dimension the dense diagonaliser will attempt.
pub const MAX_DIM: usize = 3000;

#[derive(Clone, Debug)]
pub struct HermiteOptions {
    /// Convergence threshold on the change of the requested eigenvalues
    /// between successive doublings.
    pub tol: f64,
    pub max_doublings: u32,
}

impl Default for HermiteOptions {
    fn default() -> Self {
        HermiteOptions {
            tol: 1e-10,
            max_doublings: 5,
        }
    }
}

/// Matrix of `Op^W(H)` on the states with `|k| < quanta`.
pub fn fock_matrix(h: &GradedPolynomial, hbar: f64, quanta: u32) -> Result<DMatrix<Complex64>> {
    if quanta == 0 {
        return Err(Error::validation("basis_size", "must be at least 1"));
    }
    let n = h.n();
    let states = indices_up_to(n, quanta - 1);
    if states.len() > MAX_DIM {
        return Err(Error::numerical(format!(
            "Fock basis of dimension {} exceeds the dense limit {MAX_DIM}",
            states.len()
        )));
    }
    let index: HashMap<&MultiIndex, usize> = states.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let op = weyl_to_normal(&change_coordinates(h, Basis::Complex));
    let dim = states.len();
    let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for (b, k) in states.iter().enumerate() {
        for (target, amp) in op.apply(k, hbar) {
            if let Some(&a) = index.get(&target) {
                m[(a, b)] += amp;
            }
        }
    }
    let scale = m.iter().map(|c| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let asym = (&m - m.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
    if asym > 1e-12 * scale {
        return Err(Error::validation("H", format!("symbol is not self-adjoint (defect {asym:e})")));
    }
    Ok((&m + m.adjoint()).unscale(2.0))
}

/// `vᴴ M v / vᴴ v`, summed so that large matrix entries only meet the
/// small components of a localised eigenvector.
fn rayleigh_quotient(m: &DMatrix<Complex64>, v: &DVector<Complex64>) -> f64 {
    let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    let mut acc = 0.0;
    for b in 0..v.len() {
        if v[b].norm() == 0.0 {
            continue;
        }
        let col: Complex64 = (0..v.len()).map(|a| v[a].conj() * m[(a, b)]).sum();
        acc += (col * v[b]).re;
    }
    acc / norm
}

/// Sorted eigenvalues of the truncated matrix; the lowest `refine` are
/// recomputed as Rayleigh quotients after an inverse-iteration step.
pub fn fock_eigenvalues(m: &DMatrix<Complex64>, refine: usize) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    for (slot, &i) in order.iter().enumerate().take(refine) {
        let v0: DVector<Complex64> = eig.eigenvectors.column(i).into_owned();
        let shift = vals[slot];
        let mut shifted = m.clone();
        // stay off the exact eigenvalue so the solve is well posed
        let delta = 1e-10 * shift.abs().max(1e-300) + 1e-300;
        for d in 0..m.nrows() {
            shifted[(d, d)] -= Complex64::new(shift + delta, 0.0);
        }
        let v = match shifted.lu().solve(&v0) {
            Some(w) if w.iter().all(|c| c.is_finite()) && w.norm() > 0.0 => w.normalize(),
            _ => v0,
        };
        vals[slot] = rayleigh_quotient(m, &v);
    }
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("eigenvalue computation produced non-finite values"));
    }
    Ok(vals)
}

/// Lowest `count` eigenvalues of `Op^W(H)` from a Fock-basis truncation,
/// doubling `basis_size` (the number of quanta) until they settle.
pub fn hermite_validate(
    h: &GradedPolynomial,
    hbar: f64,
    basis_size: u32,
    count: usize,
    options: &HermiteOptions,
) -> Result<SpectrumSample> {
    if h.n() > 2 {
        return Err(Error::validation("H", "the Hermite oracle supports n ≤ 2"));
    }
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::validation("hbar", "must be positive"));
    }
    if count == 0 {
        return Err(Error::validation("count", "must be at least 1"));
    }
    let mut quanta = basis_size.max(1);
    let mut prev: Option<Vec<f64>> = None;
    for _ in 0..=options.max_doublings {
        let m = fock_matrix(h, hbar, quanta)?;
        if m.nrows() >= count {
            let vals = fock_eigenvalues(&m, count)?;
            let low: Vec<f64> = vals[..count].to_vec();
            if let Some(p) = &prev {
                let change = p.iter().zip(&low).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                log::debug!("hermite: {quanta} quanta, change {change:e}");
                if change < options.tol {
                    let levels = low.iter().map(|&e| (e, None)).collect();
                    let e_cut = low[count - 1];
                    return SpectrumSample::from_levels(hbar, e_cut, levels, 1e-10, Source::Numeric);
                }
            }
            prev = Some(low);
        }
        quanta *= 2;
    }
    Err(Error::numerical(format!(
        "Hermite eigenvalues did not converge to {:e} within {} doublings",
        options.tol, options.max_doublings
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{harmonic, Monomial};

    #[test]
    fn harmonic_levels_are_exact() {
        let h = harmonic(&[1.0], Basis::Real, 4);
        let s = hermite_validate(&h, 0.1, 10, 6, &HermiteOptions::default()).unwrap();
        for (k, e) in s.energies().iter().enumerate() {
            assert!((e - 0.1 * (k as f64 + 0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn two_dimensional_degeneracy_is_merged() {
        let h = harmonic(&[1.0, 1.0], Basis::Real, 4);
        let s = hermite_validate(&h, 0.2, 6, 3, &HermiteOptions::default()).unwrap();
        assert_eq!(s.entries.len(), 2);
        assert_eq!(s.entries[1].multiplicity, 2);
        assert!((s.entries[1].energy - 0.4).abs() < 1e-12);
    }

    #[test]
    fn quartic_levels_increase_and_grow_with_basis_variationally() {
        let mut h = harmonic(&[1.0], Basis::Real, 8);
        h.add_term(Monomial::new(vec![4], vec![0], 0), Complex64::new(0.01, 0.0));
        let s = hermite_validate(&h, 0.1, 8, 5, &HermiteOptions::default()).unwrap();
        let e = s.energies();
        assert!(e.windows(2).all(|w| w[1] > w[0]));
        let mut last = f64::INFINITY;
        for q in [2u32, 3, 4, 6, 8, 12] {
            let e0 = fock_eigenvalues(&fock_matrix(&h, 0.1, q).unwrap(), 1).unwrap()[0];
            assert!(e0 <= last + 1e-16);
            last = e0;
        }
        // first-order perturbation: ħ/2 + ε(3ħ²/4)
        assert!((e[0] - (0.05 + 0.01 * 0.75 * 0.01)).abs() < 1e-6);
    }

    #[test]
    fn non_self_adjoint_input_is_rejected() {
        let mut h = harmonic(&[1.0], Basis::Real, 4);
        h.add_term(Monomial::new(vec![1], vec![0], 1), Complex64::new(0.0, 0.5));
        assert!(fock_matrix(&h, 0.1, 4).is_err());
    }
}
