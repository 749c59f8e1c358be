use super::coeff::Coeff;
use super::index::{binomial, MultiIndex};
use super::poly::{Basis, Monomial, Poly};

/// `i^k` for any integer `k`.
fn i_pow<C: Coeff>(k: i64) -> C {
    match k.rem_euclid(4) {
        0 => C::one(),
        1 => C::imag_unit(),
        2 => -C::one(),
        _ => -C::imag_unit(),
    }
}

/// One coordinate pair: expansion of `x^a ξ^b` in `z, z̄` (or the inverse)
/// as a list of `(first exponent, second exponent, coefficient)`.
fn expand_pair<C: Coeff>(a: u32, b: u32, to: Basis) -> Vec<(u32, u32, C)> {
    let mut out = Vec::new();
    match to {
        Basis::Complex => {
            // x = (z+z̄)/2, ξ = −(i/2)(z−z̄)
            let pre = C::from_ratio(1, 1i64 << (a + b)) * i_pow::<C>(-(b as i64));
            for s in 0..=a {
                for t in 0..=b {
                    let sign = if (b - t) % 2 == 1 { -1 } else { 1 };
                    let c = pre.clone()
                        * C::from_ratio(sign * binomial(a, s) * binomial(b, t), 1);
                    out.push((s + t, a - s + b - t, c));
                }
            }
        }
        Basis::Real => {
            // z = x + iξ, z̄ = x − iξ
            for s in 0..=a {
                for t in 0..=b {
                    let c = C::from_ratio(binomial(a, s) * binomial(b, t), 1)
                        * i_pow::<C>((a - s) as i64)
                        * i_pow::<C>(-((b - t) as i64));
                    out.push((s + t, a + b - s - t, c));
                }
            }
        }
    }
    out
}

/// Substitutes `x = (z+z̄)/2, ξ = (z−z̄)/(2i)` or the inverse. Degrees are
/// preserved, so the cap carries over unchanged.
pub fn change_coordinates<C: Coeff>(p: &Poly<C>, target: Basis) -> Poly<C> {
    if p.basis() == target {
        return p.clone();
    }
    let n = p.n();
    let mut out = Poly::zero(n, target, p.degree_cap());
    for (m, c) in p.terms() {
        // tensor product of per-coordinate expansions
        let mut partial: Vec<(Vec<u32>, Vec<u32>, C)> = vec![(Vec::new(), Vec::new(), c.clone())];
        for i in 0..n {
            let pair = expand_pair::<C>(m.alpha.0[i], m.beta.0[i], target);
            let mut next = Vec::with_capacity(partial.len() * pair.len());
            for (al, be, cc) in &partial {
                for (ea, eb, pc) in &pair {
                    let mut al = al.clone();
                    let mut be = be.clone();
                    al.push(*ea);
                    be.push(*eb);
                    next.push((al, be, cc.clone() * pc.clone()));
                }
            }
            partial = next;
        }
        for (al, be, cc) in partial {
            out.add_term(
                Monomial {
                    alpha: MultiIndex(al),
                    beta: MultiIndex(be),
                    hbar: m.hbar,
                },
                cc,
            );
        }
    }
    out
}
