use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::forward::resonant_eigenvalues;
use crate::error::{Error, Result};
use crate::normal_form::{
    frequencies_from_jet, normalize, resonance_order, FrequencyVector, NormalizeOptions,
};
use crate::symbol::{change_coordinates, Basis, GradedPolynomial};

#[derive(Clone, Debug)]
pub struct WeylOptions {
    pub seed: u64,
    pub batches: u32,
    pub batch_size: u32,
    /// Bound used for resonance detection when normalising the jet.
    pub resonance_bound: u32,
}

impl Default for WeylOptions {
    fn default() -> Self {
        WeylOptions {
            seed: 42,
            batches: 4,
            batch_size: 1_000_000,
            resonance_bound: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeylCount {
    pub n_exact: u64,
    pub n_weyl: f64,
    /// Monte Carlo standard error of `n_weyl`.
    pub std_err: f64,
    pub samples: u64,
}

/// Number of levels `≤ E` of the normalised jet, with multiplicity.
pub fn count_levels(h: &GradedPolynomial, hbar: f64, e: f64, resonance_bound: u32) -> Result<u64> {
    let u = frequencies_from_jet(h)?;
    let ground = hbar * u.iter().sum::<f64>() / 2.0;
    let freq = FrequencyVector::with_settings(u, vec![], resonance_bound, 1e-9)?;
    let spec = resonance_order(&freq)?;
    let nf = normalize(h, &freq, &spec, &NormalizeOptions::default())?;
    if e <= ground.min(nf.canonical.energy(&crate::symbol::MultiIndex::zeros(h.n()), hbar)) {
        return Ok(0);
    }
    let s = resonant_eigenvalues(&nf.canonical, &nf.residual, hbar, e)?;
    Ok(s.count() as u64)
}

/// Principal symbol as flat `(c, α, β)` rows for fast evaluation.
fn principal_rows(h: &GradedPolynomial) -> Vec<(f64, Vec<i32>, Vec<i32>)> {
    let hr = change_coordinates(h, Basis::Real);
    hr.terms()
        .filter(|(m, _)| m.hbar == 0)
        .map(|(m, c)| {
            (
                c.re,
                m.alpha.iter().map(|&a| a as i32).collect(),
                m.beta.iter().map(|&b| b as i32).collect(),
            )
        })
        .collect()
}

fn eval(rows: &[(f64, Vec<i32>, Vec<i32>)], x: &[f64], xi: &[f64]) -> f64 {
    rows.iter()
        .map(|(c, a, b)| {
            let mut v = *c;
            for j in 0..x.len() {
                v *= x[j].powi(a[j]) * xi[j].powi(b[j]);
            }
            v
        })
        .sum()
}

/// Compares the level count below `E` with `(2πħ)^{−n} Vol{H₀ ≤ E}`, the
/// volume estimated by Monte Carlo on a box around the well.
pub fn weyl_count_check(h: &GradedPolynomial, hbar: f64, e: f64, options: &WeylOptions) -> Result<WeylCount> {
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::validation("hbar", "must be positive"));
    }
    if !(e.is_finite() && e > 0.0) {
        return Err(Error::validation("E", "must be positive"));
    }
    if options.batches == 0 || options.batch_size == 0 {
        return Err(Error::validation("samples", "need at least one Monte Carlo sample"));
    }
    let n = h.n();
    let u = frequencies_from_jet(h)?;
    let rows = principal_rows(h);
    let umin = u.iter().copied().fold(f64::INFINITY, f64::min);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);

    // the box must contain the sublevel set: probe its faces, growing it a
    // few times before declaring the set unbounded
    let mut radius = 1.5 * (2.0 * e / umin).sqrt();
    let mut contained = false;
    let mut x = vec![0.0; n];
    let mut xi = vec![0.0; n];
    for _ in 0..4 {
        contained = true;
        'probe: for _ in 0..20_000 {
            for j in 0..n {
                x[j] = rng.random_range(-radius..radius);
                xi[j] = rng.random_range(-radius..radius);
            }
            let face = rng.random_range(0..2 * n);
            let sign = if rng.random::<bool>() { radius } else { -radius };
            if face < n {
                x[face] = sign;
            } else {
                xi[face - n] = sign;
            }
            if eval(&rows, &x, &xi) <= e {
                contained = false;
                break 'probe;
            }
        }
        if contained {
            break;
        }
        radius *= 2.0;
    }
    if !contained {
        return Err(Error::numerical(format!(
            "sublevel set {{H ≤ {e}}} reaches the sampling box boundary at radius {radius}; it appears unbounded"
        )));
    }

    let mut hits: u64 = 0;
    let total = options.batches as u64 * options.batch_size as u64;
    for _ in 0..options.batches {
        for _ in 0..options.batch_size {
            for j in 0..n {
                x[j] = rng.random_range(-radius..radius);
                xi[j] = rng.random_range(-radius..radius);
            }
            if eval(&rows, &x, &xi) <= e {
                hits += 1;
            }
        }
    }
    let box_vol = (2.0 * radius).powi(2 * n as i32);
    let p = hits as f64 / total as f64;
    let norm = (2.0 * std::f64::consts::PI * hbar).powi(n as i32);
    let n_weyl = box_vol * p / norm;
    let std_err = box_vol * (p * (1.0 - p) / total as f64).sqrt() / norm;
    let n_exact = count_levels(h, hbar, e, options.resonance_bound)?;
    log::info!("weyl: N_exact = {n_exact}, N_weyl = {n_weyl} ± {std_err}");
    Ok(WeylCount {
        n_exact,
        n_weyl,
        std_err,
        samples: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{harmonic, Monomial};
    use num_complex::Complex64;

    fn quick() -> WeylOptions {
        WeylOptions {
            batches: 2,
            batch_size: 200_000,
            ..WeylOptions::default()
        }
    }

    #[test]
    fn one_dimensional_oscillator() {
        let h = harmonic(&[1.0], Basis::Real, 4);
        let w = weyl_count_check(&h, 0.01, 1.0, &quick()).unwrap();
        assert_eq!(w.n_exact, 100);
        assert!((w.n_weyl - 100.0).abs() < 4.0 * w.std_err + 1e-9);
        assert!(w.std_err > 0.0 && w.std_err < 1.0);
    }

    #[test]
    fn below_ground_state_counts_nothing() {
        let h = harmonic(&[1.0], Basis::Real, 4);
        assert_eq!(count_levels(&h, 0.1, 0.01, 10).unwrap(), 0);
    }

    #[test]
    fn ratio_approaches_one() {
        // Vol{H₂ ≤ E}/(2πħ)² = E²/(2ħ²u₁u₂) for the two-dimensional ellipsoid
        let u = [1.0, 2f64.sqrt()];
        let h = harmonic(&u, Basis::Real, 4);
        let analytic = |hbar: f64| 1.0 / (2.0 * hbar * hbar * u[0] * u[1]);
        let mut last = f64::INFINITY;
        for hbar in [0.05, 0.015, 0.005] {
            let dev = (count_levels(&h, hbar, 1.0, 10).unwrap() as f64 / analytic(hbar) - 1.0).abs();
            assert!(dev < last);
            last = dev;
        }
        assert!(last < 1e-3);
        let w = weyl_count_check(&h, 0.005, 1.0, &quick()).unwrap();
        assert!((w.n_weyl - analytic(0.005)).abs() < 4.0 * w.std_err);
    }

    #[test]
    fn unbounded_sublevel_set_is_detected() {
        let mut h = harmonic(&[1.0], Basis::Real, 4);
        h.add_term(Monomial::new(vec![4], vec![0], 0), Complex64::new(-0.5, 0.0));
        assert!(weyl_count_check(&h, 0.01, 1.0, &quick()).is_err());
    }
}
