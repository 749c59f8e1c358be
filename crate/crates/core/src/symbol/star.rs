//! Moyal star product and the brackets built from it.
//!
//! With `Π(A,B) = Σ_i ∂A/∂x_i ∂B/∂ξ_i − ∂A/∂ξ_i ∂B/∂x_i` the product is
//! `A⋆B = Σ_k (1/k!) (iℏ/2)^k Π^k(A,B)`, so that `x⋆ξ − ξ⋆x = iℏ`. In the
//! complex basis `(iℏ/2)Π = ℏ(∂_z ⊗ ∂_z̄ − ∂_z̄ ⊗ ∂_z)`, which gives the same
//! expansion with `(x, ξ) → (z, z̄)` and `iℏ/2 → ℏ`.

use super::coeff::Coeff;
use super::index::{binomial, falling, MultiIndex};
use super::poly::{Basis, Monomial, Poly};
use crate::error::Result;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Orders {
    All,
    Odd,
    First,
}

/// Per-unit-order weight of the bidifferential expansion (`i/2` or `1`).
fn order_weight<C: Coeff>(basis: Basis) -> C {
    match basis {
        Basis::Real => C::imag_unit() * C::from_ratio(1, 2),
        Basis::Complex => C::one(),
    }
}

/// Visits every `p ≤ bound` componentwise.
fn for_each_below(bound: &[u32], mut f: impl FnMut(&[u32])) {
    let mut cur = vec![0u32; bound.len()];
    loop {
        f(&cur);
        let mut i = 0;
        loop {
            if i == bound.len() {
                return;
            }
            if cur[i] < bound[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// Core expansion. `hbar_shift` adds `|p|+|q|` to the ℏ power when true.
fn bidifferential<C: Coeff>(
    a: &Poly<C>,
    b: &Poly<C>,
    cap: u32,
    orders: Orders,
    weight: C,
    hbar_shift: bool,
) -> Poly<C> {
    let n = a.n();
    let mut out = Poly::zero(n, a.basis(), cap);
    let max_k = match orders {
        Orders::First => 1,
        _ => cap,
    };
    let mut weight_pow = vec![C::one()];
    for k in 1..=max_k as usize {
        let w = weight_pow[k - 1].clone() * weight.clone();
        weight_pow.push(w);
    }
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            let base_degree = ma.degree() + mb.degree();
            if hbar_shift && base_degree > cap {
                continue;
            }
            let pbound: Vec<u32> = (0..n).map(|i| ma.alpha.0[i].min(mb.beta.0[i])).collect();
            let qbound: Vec<u32> = (0..n).map(|i| ma.beta.0[i].min(mb.alpha.0[i])).collect();
            let cab = ca.clone() * cb.clone();
            for_each_below(&pbound, |p| {
                let pk: u32 = p.iter().sum();
                if pk > max_k {
                    return;
                }
                let mut pfac: i64 = 1;
                for i in 0..n {
                    pfac *= binomial(ma.alpha.0[i], p[i]) * falling(mb.beta.0[i], p[i]);
                }
                for_each_below(&qbound, |q| {
                    let qk: u32 = q.iter().sum();
                    let k = pk + qk;
                    let keep = match orders {
                        Orders::All => k <= max_k,
                        Orders::Odd => k % 2 == 1,
                        Orders::First => k == 1,
                    };
                    if !keep {
                        return;
                    }
                    let mut fac = pfac;
                    for i in 0..n {
                        fac *= binomial(ma.beta.0[i], q[i]) * falling(mb.alpha.0[i], q[i]);
                    }
                    if qk % 2 == 1 {
                        fac = -fac;
                    }
                    let alpha: Vec<u32> = (0..n)
                        .map(|i| ma.alpha.0[i] - p[i] + mb.alpha.0[i] - q[i])
                        .collect();
                    let beta: Vec<u32> = (0..n)
                        .map(|i| ma.beta.0[i] - q[i] + mb.beta.0[i] - p[i])
                        .collect();
                    let hbar = ma.hbar + mb.hbar + if hbar_shift { k } else { 0 };
                    let m = Monomial {
                        alpha: MultiIndex(alpha),
                        beta: MultiIndex(beta),
                        hbar,
                    };
                    let c = cab.clone() * weight_pow[k as usize].clone() * C::from_ratio(fac, 1);
                    out.add_term(m, c);
                });
            });
        }
    }
    out
}

/// `A ⋆ B`, truncated at the smaller of the two caps.
pub fn star_product<C: Coeff>(a: &Poly<C>, b: &Poly<C>) -> Result<Poly<C>> {
    a.same_space(b)?;
    let cap = a.degree_cap().min(b.degree_cap());
    Ok(bidifferential(a, b, cap, Orders::All, order_weight(a.basis()), true))
}

/// `(A⋆B − B⋆A)/(iℏ)`. Only odd orders of the expansion survive the
/// antisymmetrisation, so they are computed directly.
pub fn moyal_bracket<C: Coeff>(a: &Poly<C>, b: &Poly<C>) -> Result<Poly<C>> {
    a.same_space(b)?;
    let cap = a.degree_cap().min(b.degree_cap());
    let odd = bidifferential(a, b, cap + 2, Orders::Odd, order_weight(a.basis()), true);
    // 2·(odd part)/(iℏ): lower the ℏ power by one, multiply by −2i.
    let factor = -(C::imag_unit() * C::from_ratio(2, 1));
    let mut out = Poly::zero(a.n(), a.basis(), cap);
    for (m, c) in odd.terms() {
        debug_assert!(m.hbar > 0);
        let mut m = m.clone();
        m.hbar -= 1;
        out.add_term(m, c.clone() * factor.clone());
    }
    Ok(out)
}

/// The bidifferential `Π(A,B) = Σ ∂_x A ∂_ξ B − ∂_ξ A ∂_x B` (no ℏ).
pub fn pi_bracket<C: Coeff>(a: &Poly<C>, b: &Poly<C>) -> Result<Poly<C>> {
    a.same_space(b)?;
    let cap = a.degree_cap().min(b.degree_cap());
    let raw = bidifferential(a, b, cap, Orders::First, C::one(), false);
    Ok(match a.basis() {
        Basis::Real => raw,
        // Π = 2i(∂_z̄ ⊗ ∂_z − ∂_z ⊗ ∂_z̄) = −2i·raw.
        Basis::Complex => raw.scale(-(C::imag_unit() * C::from_ratio(2, 1))),
    })
}

/// Classical bracket `{A,B} = v_A B` with
/// `v_A = Σ ∂A/∂ξ_i ∂/∂x_i − ∂A/∂x_i ∂/∂ξ_i`; equals `−Π(A,B)`.
pub fn poisson_bracket<C: Coeff>(a: &Poly<C>, b: &Poly<C>) -> Result<Poly<C>> {
    Ok(pi_bracket(a, b)?.scale(-C::one()))
}
