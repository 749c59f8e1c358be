use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::symbol::{
    change_coordinates, harmonic, moyal_bracket, Basis, GradedPolynomial, Monomial, MultiIndex, Poly,
};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn quartic(eps: f64, cap: u32) -> GradedPolynomial {
    let mut h = harmonic(&[1.0], Basis::Real, cap);
    h.add_term(Monomial::new(vec![4], vec![0], 0), c(eps));
    h
}

fn nonres(n_bound: u32) -> ResonanceSpec {
    ResonanceSpec::NonResonant { bound: n_bound }
}

#[test]
fn harmonic_input_has_empty_normal_form() {
    let u = FrequencyVector::new(vec![1.0, 2f64.sqrt()]).unwrap();
    let h = harmonic(&u.u, Basis::Real, 8);
    let nf = normalize(&h, &u, &nonres(10), &NormalizeOptions::default()).unwrap();
    assert!(nf.canonical.coeffs.is_empty());
    assert!(nf.residual.is_zero());
}

#[test]
fn quartic_oscillator_coefficients() {
    let u = FrequencyVector::new(vec![1.0]).unwrap();
    let nf = normalize(&quartic(0.01, 8), &u, &nonres(10), &NormalizeOptions::default()).unwrap();
    let cf = &nf.canonical;
    assert!((cf.coeff(&MultiIndex(vec![2]), 0) - 0.015).abs() < 1e-12);
    assert!((cf.coeff(&MultiIndex(vec![0]), 2) - 0.00375).abs() < 1e-12);
    assert_eq!(cf.coeff(&MultiIndex(vec![1]), 0), 0.0);
    assert_eq!(cf.coeff(&MultiIndex(vec![0]), 1), 0.0);
    assert_eq!(cf.l_max, 3);
    // c_{(2),0} breaks the literal ħ^{|r|-1} prefactor
    assert_eq!(cf.strict_violations(1e-14).len() >= 1, true);
}

#[test]
fn quartic_coefficients_are_linear_in_epsilon_at_stage_one() {
    let u = FrequencyVector::new(vec![1.0]).unwrap();
    for eps in [0.001, 0.02, 0.1] {
        let nf = normalize(&quartic(eps, 6), &u, &nonres(10), &NormalizeOptions::default()).unwrap();
        assert!((nf.canonical.coeff(&MultiIndex(vec![2]), 0) - 1.5 * eps).abs() < 1e-13);
        assert!((nf.canonical.coeff(&MultiIndex(vec![0]), 2) - 0.375 * eps).abs() < 1e-13);
    }
}

fn random_jet(rng: &mut ChaCha8Rng, u: &[f64], max_deg: u32, cap: u32, scale: f64) -> GradedPolynomial {
    let n = u.len();
    let mut h = harmonic(u, Basis::Real, cap);
    for d in 3..=max_deg {
        for j in 0..=d / 2 {
            let rest = d - 2 * j;
            if rest == 0 && j == 1 {
                continue;
            }
            let mut ms = Vec::new();
            crate::symbol::indices_of_order(2 * n, rest, &mut ms);
            for ab in ms {
                let m = Monomial::new(ab.0[..n].to_vec(), ab.0[n..].to_vec(), j);
                h.add_term(m, c(rng.random_range(-scale..scale)));
            }
        }
    }
    h
}

#[test]
fn kernel_property_and_conjugation_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let uv = vec![1.0, 2f64.sqrt()];
    let u = FrequencyVector::new(uv.clone()).unwrap();
    let h = random_jet(&mut rng, &uv, 4, 8, 0.05);
    let nf = normalize(&h, &u, &nonres(10), &NormalizeOptions::default()).unwrap();
    let h2 = harmonic(&uv, Basis::Complex, 8);
    assert!(moyal_bracket(&h2, &nf.h_can).unwrap().max_abs() < 1e-12);

    let replayed = replay_transforms(&h, &nf.transforms).unwrap();
    let scale = nf.h_can.max_abs();
    assert!(replayed.distance(&nf.h_can) < 1e-10 * scale);

    for ((r, i), _) in &nf.canonical.coeffs {
        assert!(!(r.order() == 1 && *i == 0));
    }
}

#[test]
fn phase_rotation_leaves_coefficients_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let uv = vec![1.0, 2f64.sqrt()];
    let u = FrequencyVector::new(uv.clone()).unwrap();
    let h = random_jet(&mut rng, &uv, 4, 8, 0.05);
    let base = normalize(&h, &u, &nonres(10), &NormalizeOptions::default()).unwrap();
    let rotated = rotate_phases(&h, &[0.7, -2.1]);
    let other = normalize(&rotated, &u, &nonres(10), &NormalizeOptions::default()).unwrap();
    assert!(base.canonical.max_coeff_diff(&other.canonical) < 1e-10);
}

#[test]
fn normalising_a_canonical_form_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let uv = vec![1.0, 2f64.sqrt()];
    let u = FrequencyVector::new(uv.clone()).unwrap();
    let h = random_jet(&mut rng, &uv, 4, 8, 0.05);
    let nf = normalize(&h, &u, &nonres(10), &NormalizeOptions::default()).unwrap();
    let again_input = change_coordinates(&nf.h_can, Basis::Real);
    let again = normalize(&again_input, &u, &nonres(10), &NormalizeOptions::default()).unwrap();
    assert!(again.transforms.iter().all(|w| w.max_abs() < 1e-12));
    assert!(nf.canonical.max_coeff_diff(&again.canonical) < 1e-12);
}

#[test]
fn resonant_cubic_lands_in_residual() {
    // u = (1,2): z₁² z̄₂ + z̄₁² z₂ is resonant at degree 3 = d.
    let uv = vec![1.0, 2.0];
    let u = FrequencyVector::new(uv.clone()).unwrap();
    let spec = resonance_order(&FrequencyVector::with_settings(uv.clone(), vec![], 6, 1e-9).unwrap()).unwrap();
    assert_eq!(spec.order(), Some(3));
    let mut kc = Poly::zero(2, Basis::Complex, 6);
    kc.add_term(Monomial::new(vec![2, 0], vec![0, 1], 0), c(0.01));
    kc.add_term(Monomial::new(vec![0, 1], vec![2, 0], 0), c(0.01));
    let h = harmonic(&uv, Basis::Real, 6).add(&change_coordinates(&kc, Basis::Real)).unwrap();
    let nf = normalize(&h, &u, &spec, &NormalizeOptions::default()).unwrap();
    assert!(nf.residual.has_degree_d_terms);
    let got = nf.residual.k.coeff(&Monomial::new(vec![2, 0], vec![0, 1], 0));
    assert!((got - c(0.01)).norm() < 1e-14);
    let h2 = harmonic(&uv, Basis::Complex, 6);
    assert!(moyal_bracket(&h2, &nf.residual.k).unwrap().max_abs() < 1e-14);
    // and the same term is a small-divisor failure when declared non-resonant
    assert!(matches!(
        normalize(&h, &u, &nonres(10), &NormalizeOptions::default()),
        Err(crate::Error::SmallDivisor { .. })
    ));
}

#[test]
fn homological_solution_satisfies_its_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let uv = vec![1.0, 2f64.sqrt()];
    let u = FrequencyVector::new(uv.clone()).unwrap();
    let spec = nonres(10);
    let h2 = harmonic(&uv, Basis::Complex, 8);
    for _ in 0..10 {
        let real = random_jet(&mut rng, &uv, 5, 8, 1.0).filter(|m, _| m.degree() == 5);
        let (_, image) = resonant_projector(&change_coordinates(&real, Basis::Complex), &spec).unwrap();
        let w = homological_solve(&image, &u, &spec, 1e-8).unwrap();
        assert!(moyal_bracket(&h2, &w).unwrap().distance(&image) < 1e-12 * image.max_abs().max(1.0));
        assert!(w.is_real_symbol(1e-12));
    }
    let zero = Poly::zero(2, Basis::Complex, 8);
    assert!(homological_solve(&zero, &u, &spec, 1e-8).unwrap().is_zero());
}

#[test]
fn single_cubic_generator() {
    // n = 1, u = 1: R = z³ → W = z³/(3i)
    let u = FrequencyVector::new(vec![1.0]).unwrap();
    let r = Poly::monomial(1, Basis::Complex, 6, Monomial::new(vec![3], vec![0], 0), c(1.0));
    let w = homological_solve(&r, &u, &nonres(10), 1e-8).unwrap();
    let want = Complex64::new(0.0, -1.0 / 3.0);
    assert!((w.coeff(&Monomial::new(vec![3], vec![0], 0)) - want).norm() < 1e-15);
}

#[test]
fn projector_examples() {
    let spec = nonres(10);
    let mut a = Poly::zero(1, Basis::Complex, 6);
    a.add_term(Monomial::new(vec![2], vec![2], 0), c(1.0));
    a.add_term(Monomial::new(vec![3], vec![0], 0), c(1.0));
    let (k, i) = resonant_projector(&a, &spec).unwrap();
    assert_eq!(k.len(), 1);
    assert_eq!(i.len(), 1);
    assert_eq!(k.add(&i).unwrap(), a);

    let res = ResonanceSpec::Resonant { bound: 6, d: 3, relations: vec![vec![2, -1]] };
    let m = Poly::monomial(2, Basis::Complex, 6, Monomial::new(vec![0, 1], vec![2, 0], 0), c(1.0));
    let (k, i) = resonant_projector(&m, &res).unwrap();
    assert_eq!(k.len(), 1);
    assert!(i.is_zero());
}

#[test]
fn lie_transform_edge_cases() {
    let h = quartic(0.01, 8);
    let hc = change_coordinates(&h, Basis::Complex);
    let zero = Poly::zero(1, Basis::Complex, 8);
    assert_eq!(apply_lie_transform(&hc, &zero).unwrap(), hc);
    let quad = Poly::monomial(1, Basis::Complex, 8, Monomial::new(vec![2], vec![0], 0), c(1.0));
    assert!(apply_lie_transform(&hc, &quad).is_err());

    let w = Poly::monomial(1, Basis::Complex, 8, Monomial::new(vec![4], vec![1], 0), Complex64::new(0.0, 0.3))
        .add(&Poly::monomial(1, Basis::Complex, 8, Monomial::new(vec![1], vec![4], 0), Complex64::new(0.0, -0.3)))
        .unwrap();
    let out = apply_lie_transform(&hc, &w).unwrap();
    for d in 0..5 {
        assert_eq!(out.homogeneous_part(d), hc.homogeneous_part(d));
    }
}

#[test]
fn preconditions_are_enforced() {
    let u = FrequencyVector::new(vec![1.0]).unwrap();
    let mut h = quartic(0.01, 6);
    h.add_term(Monomial::new(vec![0], vec![0], 1), c(0.2));
    assert!(matches!(
        normalize(&h, &u, &nonres(10), &NormalizeOptions::default()),
        Err(crate::Error::Validation { .. })
    ));
    let wrong = FrequencyVector::new(vec![1.5]).unwrap();
    assert!(normalize(&quartic(0.01, 6), &wrong, &nonres(10), &NormalizeOptions::default()).is_err());
    let mut lin = quartic(0.01, 6);
    lin.add_term(Monomial::new(vec![1], vec![0], 0), c(0.2));
    assert!(normalize(&lin, &u, &nonres(10), &NormalizeOptions::default()).is_err());
    assert_eq!(frequencies_from_jet(&quartic(0.01, 6)).unwrap(), vec![1.0]);
}
