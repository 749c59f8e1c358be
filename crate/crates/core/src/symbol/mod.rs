//! Graded phase-space symbols.
//!
//! A monomial `x^α ξ^β ℏ^j` has degree `|α| + |β| + 2j`; every polynomial
//! carries a degree cap and all products truncate at it.

mod coeff;
mod coords;
mod index;
mod ordering;
mod poly;
mod star;

pub use coeff::{Coeff, ExactComplex};
pub use coords::change_coordinates;
pub use index::{indices_of_order, indices_up_to, MultiIndex};
pub use ordering::{ladder_element, weyl_to_normal, NormalOrdered, NormalTerm};
pub use poly::{Basis, GradedPolynomial, Monomial, PhasePoint, Poly};
pub use star::{moyal_bracket, pi_bracket, poisson_bracket, star_product};

use num_complex::Complex64;

/// `H₂ = Σ u_i/2 (x_i² + ξ_i²)` in the requested basis.
pub fn harmonic(u: &[f64], basis: Basis, degree_cap: u32) -> GradedPolynomial {
    let n = u.len();
    let mut p = Poly::zero(n, basis, degree_cap);
    for (i, &ui) in u.iter().enumerate() {
        let two = MultiIndex({
            let mut v = vec![0; n];
            v[i] = 2;
            v
        });
        match basis {
            Basis::Real => {
                p.add_term(
                    Monomial::new(two.clone(), MultiIndex::zeros(n), 0),
                    Complex64::new(ui / 2.0, 0.0),
                );
                p.add_term(
                    Monomial::new(MultiIndex::zeros(n), two, 0),
                    Complex64::new(ui / 2.0, 0.0),
                );
            }
            Basis::Complex => p.add_term(
                Monomial::new(MultiIndex::unit(n, i), MultiIndex::unit(n, i), 0),
                Complex64::new(ui / 2.0, 0.0),
            ),
        }
    }
    p
}

/// Action `p_i = (x_i² + ξ_i²)/2`.
pub fn action(n: usize, i: usize, basis: Basis, degree_cap: u32) -> GradedPolynomial {
    let mut u = vec![0.0; n];
    u[i] = 1.0;
    harmonic(&u, basis, degree_cap)
}

#[cfg(test)]
mod tests;
