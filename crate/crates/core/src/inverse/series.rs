use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::least_squares;

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesFit {
    /// `v[ℓ]` estimates `𝔭_ℓ` at the point; `v[0]` is held at zero.
    pub v: Vec<f64>,
    /// `ħ⁰` coefficient of an unconstrained fit; vanishes on valid data.
    pub v0: f64,
    pub cond: f64,
    pub residual: f64,
}

/// Least-squares fit of `r(ħ) = Σ_{ℓ=1}^{L} ħ^ℓ v_ℓ` to samples of
/// `r = E/ħ − u·(k+½)` (or its cluster sum).
pub fn fit_hbar_series(hbars: &[f64], values: &[f64], l_max: u32, cond_cap: f64) -> Result<SeriesFit> {
    if hbars.len() != values.len() {
        return Err(Error::validation("spectra", "one value per ħ required"));
    }
    let mut sorted = hbars.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::validation("hbar", "duplicate ħ in the grid"));
    }
    let need = l_max as usize + 1;
    if hbars.len() < need {
        return Err(Error::validation(
            "hbar",
            format!("L_max = {l_max} needs at least {need} values of ħ, got {}", hbars.len()),
        ));
    }
    let b = DVector::from_column_slice(values);
    let design = |first: u32| {
        DMatrix::from_fn(hbars.len(), (l_max + 1 - first) as usize, |i, j| {
            hbars[i].powi(first as i32 + j as i32)
        })
    };
    let hint = "; use a wider geometric ħ grid";
    let constrained = least_squares(&design(1), &b, cond_cap, "ħ-series fit")
        .map_err(|e| Error::numerical(format!("{e}{hint}")))?;
    let free = least_squares(&design(0), &b, cond_cap, "ħ-series consistency fit")
        .map_err(|e| Error::numerical(format!("{e}{hint}")))?;
    let mut v = vec![0.0];
    v.extend(constrained.x.iter());
    Ok(SeriesFit {
        v,
        v0: free.x[0],
        cond: constrained.cond.max(free.cond),
        residual: constrained.residual,
    })
}

/// Geometric grid `ħ_max·2^{−m}`, `m = 0..count`.
pub fn geometric_grid(hbar_max: f64, count: usize) -> Vec<f64> {
    (0..count).map(|m| hbar_max * 0.5f64.powi(m as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::COND_CAP;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn harmonic_data_fits_to_zero() {
        let h = geometric_grid(0.1, 6);
        let f = fit_hbar_series(&h, &vec![0.0; 6], 3, COND_CAP).unwrap();
        assert!(f.v.iter().all(|&x| x == 0.0));
        assert_eq!(f.v0, 0.0);
    }

    #[test]
    fn quartic_ground_state_value() {
        let h = geometric_grid(0.1, 5);
        // E₀/ħ − ½ for the quartic canonical form
        let vals: Vec<f64> = h.iter().map(|&x| (0.015 * 0.25 + 0.00375) * x).collect();
        let f = fit_hbar_series(&h, &vals, 3, COND_CAP).unwrap();
        assert!((f.v[1] - 0.0075).abs() < 1e-12);
        assert!(f.v0.abs() < 1e-12);
    }

    #[test]
    fn noisy_synthetic_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let h = geometric_grid(0.1, 6);
        let truth = [0.0, 0.3, -1.2, 2.5];
        let noise = 1e-12;
        let vals: Vec<f64> = h
            .iter()
            .map(|&x| (1..4).map(|l| truth[l] * x.powi(l as i32)).sum::<f64>() + noise * rng.random_range(-1.0..1.0))
            .collect();
        let f = fit_hbar_series(&h, &vals, 3, COND_CAP).unwrap();
        // worst-case propagation of the noise through the pseudo-inverse
        let a = DMatrix::from_fn(6, 3, |i, j| h[i].powi(j as i32 + 1));
        let pinv = a.pseudo_inverse(1e-300).unwrap();
        for l in 1..4 {
            let bound = noise * pinv.row(l - 1).iter().map(|x| x.abs()).sum::<f64>();
            let err = (f.v[l] - truth[l]).abs();
            assert!(err <= bound * (1.0 + 1e-6) + 1e-14, "ℓ={l}: {err:e} > {bound:e}");
        }
        assert!((f.v[1] - truth[1]).abs() < 1e-9);
        assert!(f.v0.abs() < 1e-9);
    }

    #[test]
    fn bad_grids_are_rejected() {
        assert!(fit_hbar_series(&[0.1, 0.1, 0.05, 0.01], &[0.0; 4], 3, COND_CAP).is_err());
        assert!(fit_hbar_series(&[0.1, 0.05], &[0.0; 2], 3, COND_CAP).is_err());
        let clustered = [0.1, 0.1 + 1e-9, 0.1 + 2e-9, 0.1 + 3e-9];
        assert!(fit_hbar_series(&clustered, &[0.0; 4], 3, COND_CAP).is_err());
    }
}
