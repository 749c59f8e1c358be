use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::symbol::{indices_up_to, MultiIndex};

/// Stage polynomial `𝔭_ℓ` in the shifted lattice variable `y = k + ½`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticePolynomial {
    pub l: u32,
    pub n: usize,
    pub coeffs: BTreeMap<MultiIndex, f64>,
}

impl LatticePolynomial {
    pub fn zero(l: u32, n: usize) -> Self {
        LatticePolynomial {
            l,
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn evaluate(&self, y: &[f64]) -> f64 {
        self.coeffs.iter().map(|(r, c)| c * r.pow(y)).sum()
    }

    pub fn at_lattice(&self, k: &MultiIndex) -> f64 {
        let y: Vec<f64> = k.iter().map(|&e| e as f64 + 0.5).collect();
        self.evaluate(&y)
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().map(|r| r.order()).max()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interpolation {
    pub coeffs: BTreeMap<MultiIndex, f64>,
    /// Largest misfit over all supplied values (nonzero only when points
    /// beyond `|k| ≤ N` were supplied or the data are not polynomial).
    pub residual: f64,
}

/// Monomial coefficients of the degree-`N` polynomial through
/// `(j + ½, vals[j])`, `j = 0..=N`.
fn interpolate_1d(vals: &[f64]) -> Vec<f64> {
    let m = vals.len();
    let x: Vec<f64> = (0..m).map(|j| j as f64 + 0.5).collect();
    let mut dd = vals.to_vec();
    for level in 1..m {
        for i in (level..m).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (x[i] - x[i - level]);
        }
    }
    // Newton form → monomial basis, nested from the top
    let mut p = vec![0.0; m];
    for i in (0..m).rev() {
        let mut next = vec![0.0; m];
        for (d, &c) in p.iter().enumerate() {
            if d + 1 < m {
                next[d + 1] += c;
            }
            next[d] -= c * x[i];
        }
        next[0] += dd[i];
        p = next;
    }
    p
}

/// `j`-th forward difference over unit spacing divided by `j!`: the
/// leading coefficient of the degree-`j` interpolant.
fn leading_coefficient(vals: &[f64]) -> f64 {
    let j = vals.len() - 1;
    let mut d = vals.to_vec();
    for level in 0..j {
        for i in 0..j - level {
            d[i] = d[i + 1] - d[i];
        }
    }
    let fact: f64 = (1..=j).map(|x| x as f64).product();
    d[0] / fact
}

/// Induction on the number of variables: along `y₁` peel the coefficient
/// `g_j(y')` of `y₁^j` for `j = N..0` from the values on the slices
/// `|k'| ≤ N − j`, interpolate it in `n − 1` variables, subtract, repeat.
fn interpolate_rec(n: usize, degree: u32, value: &dyn Fn(&[u32]) -> f64) -> BTreeMap<Vec<u32>, f64> {
    let mut out = BTreeMap::new();
    if n == 1 {
        let vals: Vec<f64> = (0..=degree).map(|k| value(&[k])).collect();
        for (d, c) in interpolate_1d(&vals).into_iter().enumerate() {
            if c != 0.0 {
                out.insert(vec![d as u32], c);
            }
        }
        return out;
    }
    let mut r: HashMap<Vec<u32>, f64> = indices_up_to(n, degree)
        .into_iter()
        .map(|k| {
            let v = value(&k.0);
            (k.0, v)
        })
        .collect();
    for j in (0..=degree).rev() {
        let lead = |kp: &[u32]| -> f64 {
            let vals: Vec<f64> = (0..=j)
                .map(|k1| {
                    let mut k = vec![k1];
                    k.extend_from_slice(kp);
                    r[&k]
                })
                .collect();
            leading_coefficient(&vals)
        };
        let g = interpolate_rec(n - 1, degree - j, &lead);
        for (k, v) in r.iter_mut() {
            let y1 = k[0] as f64 + 0.5;
            let yp: Vec<f64> = k[1..].iter().map(|&e| e as f64 + 0.5).collect();
            let gv: f64 = g
                .iter()
                .map(|(a, c)| c * a.iter().zip(&yp).map(|(&e, y)| y.powi(e as i32)).product::<f64>())
                .sum();
            *v -= y1.powi(j as i32) * gv;
        }
        for (a, c) in g {
            let mut key = vec![j];
            key.extend(a);
            out.insert(key, c);
        }
    }
    out
}

/// Unique polynomial of total degree `≤ N` in `y = k + ½` through values
/// given on every `k ∈ ℤ₊ⁿ` with `|k| ≤ N`.
pub fn interpolate_polynomial(values: &[(MultiIndex, f64)], n: usize, degree: u32) -> Result<Interpolation> {
    let mut map: HashMap<&MultiIndex, f64> = HashMap::new();
    for (k, v) in values {
        if k.len() != n {
            return Err(Error::validation("values", format!("lattice point {k} has the wrong length")));
        }
        if !v.is_finite() {
            return Err(Error::validation("values", format!("value at {k} is not finite")));
        }
        if let Some(old) = map.insert(k, *v) {
            if old != *v {
                return Err(Error::validation(
                    "values",
                    format!("inconsistent duplicate values at {k}: {old} and {v}"),
                ));
            }
        }
    }
    let needed = indices_up_to(n, degree);
    if let Some(k) = needed.iter().find(|k| !map.contains_key(k)) {
        return Err(Error::validation("values", format!("missing lattice value at {k}")));
    }
    let lookup = |k: &[u32]| map[&MultiIndex(k.to_vec())];
    let raw = interpolate_rec(n, degree, &lookup);
    let coeffs: BTreeMap<MultiIndex, f64> = raw.into_iter().map(|(k, c)| (MultiIndex(k), c)).collect();
    let poly = LatticePolynomial {
        l: 0,
        n,
        coeffs,
    };
    let residual = map
        .iter()
        .map(|(k, v)| (poly.at_lattice(k) - v).abs())
        .fold(0.0, f64::max);
    Ok(Interpolation {
        coeffs: poly.coeffs,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn values_of(p: &LatticePolynomial, degree: u32) -> Vec<(MultiIndex, f64)> {
        indices_up_to(p.n, degree).into_iter().map(|k| {
            let v = p.at_lattice(&k);
            (k, v)
        }).collect()
    }

    fn vandermonde(values: &[(MultiIndex, f64)], n: usize, degree: u32) -> BTreeMap<MultiIndex, f64> {
        let monos = indices_up_to(n, degree);
        let a = DMatrix::from_fn(values.len(), monos.len(), |i, j| {
            let y: Vec<f64> = values[i].0.iter().map(|&e| e as f64 + 0.5).collect();
            monos[j].pow(&y)
        });
        let b = DVector::from_iterator(values.len(), values.iter().map(|(_, v)| *v));
        let x = a.lu().solve(&b).unwrap();
        monos.into_iter().zip(x.iter().copied()).collect()
    }

    #[test]
    fn constants_and_lines() {
        let vals = vec![(MultiIndex(vec![0, 0]), 2.5)];
        let r = interpolate_polynomial(&vals, 2, 0).unwrap();
        assert_eq!(r.coeffs.get(&MultiIndex(vec![0, 0])), Some(&2.5));
        let vals = vec![(MultiIndex(vec![0]), 1.0), (MultiIndex(vec![1]), 3.0)];
        let r = interpolate_polynomial(&vals, 1, 1).unwrap();
        assert!(r.coeffs.get(&MultiIndex(vec![0])).copied().unwrap_or(0.0).abs() < 1e-15);
        assert!((r.coeffs[&MultiIndex(vec![1])] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn agrees_with_dense_vandermonde() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..60 {
            let n = rng.random_range(1..=3);
            let degree = rng.random_range(0..=4);
            let mut p = LatticePolynomial::zero(0, n);
            for r in indices_up_to(n, degree) {
                p.coeffs.insert(r, rng.random_range(-1.0..1.0));
            }
            let vals = values_of(&p, degree);
            let got = interpolate_polynomial(&vals, n, degree).unwrap();
            let oracle = vandermonde(&vals, n, degree);
            for (r, c) in &p.coeffs {
                let g = got.coeffs.get(r).copied().unwrap_or(0.0);
                assert!((g - c).abs() < 1e-10, "n={n} N={degree} r={r}: {g} vs {c}");
                assert!((g - oracle[r]).abs() < 1e-9);
            }
            assert!(got.residual < 1e-10);
        }
    }

    #[test]
    fn missing_and_conflicting_values() {
        let vals = vec![(MultiIndex(vec![0, 0]), 1.0), (MultiIndex(vec![1, 0]), 1.0)];
        assert!(interpolate_polynomial(&vals, 2, 1).is_err());
        let vals = vec![(MultiIndex(vec![0]), 1.0), (MultiIndex(vec![0]), 2.0)];
        assert!(interpolate_polynomial(&vals, 1, 0).is_err());
    }

    #[test]
    fn extra_points_expose_non_polynomial_data() {
        let vals: Vec<(MultiIndex, f64)> = (0..4u32).map(|k| (MultiIndex(vec![k]), (k as f64).exp())).collect();
        let r = interpolate_polynomial(&vals, 1, 2).unwrap();
        assert!(r.residual > 1e-3);
    }
}
