use num_complex::Complex64;
use proptest::prelude::*;

use super::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mono(n: usize, basis: Basis, cap: u32, a: Vec<u32>, b: Vec<u32>, j: u32, v: Complex64) -> GradedPolynomial {
    let _ = n;
    Poly::monomial(a.len(), basis, cap, Monomial::new(a, b, j), v)
}

fn x(cap: u32) -> GradedPolynomial {
    mono(1, Basis::Real, cap, vec![1], vec![0], 0, c(1.0, 0.0))
}

fn xi(cap: u32) -> GradedPolynomial {
    mono(1, Basis::Real, cap, vec![0], vec![1], 0, c(1.0, 0.0))
}

#[test]
fn one_is_the_unit() {
    let b = mono(1, Basis::Real, 6, vec![2], vec![1], 1, c(0.3, -0.2));
    let one = Poly::one(1, Basis::Real, 6);
    assert_eq!(star_product(&one, &b).unwrap(), b);
    assert_eq!(star_product(&b, &one).unwrap(), b);
}

#[test]
fn canonical_commutator() {
    let lhs = star_product(&x(4), &xi(4))
        .unwrap()
        .sub(&star_product(&xi(4), &x(4)).unwrap())
        .unwrap();
    assert_eq!(lhs.len(), 1);
    let want = Monomial::new(vec![0], vec![0], 1);
    assert!((lhs.coeff(&want) - c(0.0, 1.0)).norm() < 1e-15);
    let br = moyal_bracket(&x(4), &xi(4)).unwrap();
    assert_eq!(br.len(), 1);
    assert!((br.coeff(&Monomial::constant(1)) - c(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn functions_of_x_commute() {
    let a = mono(1, Basis::Real, 8, vec![2], vec![0], 0, c(1.0, 0.0));
    let b = mono(1, Basis::Real, 8, vec![3], vec![0], 0, c(1.0, 0.0));
    let p = star_product(&a, &b).unwrap();
    assert_eq!(p, mono(1, Basis::Real, 8, vec![5], vec![0], 0, c(1.0, 0.0)));
}

#[test]
fn dimension_mismatch_is_an_error() {
    let a = x(4);
    let b = Poly::one(2, Basis::Real, 4);
    assert!(star_product(&a, &b).is_err());
    let bc = Poly::one(1, Basis::Complex, 4);
    assert!(moyal_bracket(&a, &bc).is_err());
}

#[test]
fn actions_commute_with_harmonic_part() {
    let u = [1.0, 2f64.sqrt()];
    for basis in [Basis::Real, Basis::Complex] {
        let h2 = harmonic(&u, basis, 6);
        for i in 0..2 {
            assert!(moyal_bracket(&h2, &action(2, i, basis, 6)).unwrap().max_abs() < 1e-15);
        }
    }
}

#[test]
fn harmonic_bracket_eigenvalue_in_complex_basis() {
    let h2 = harmonic(&[1.7], Basis::Complex, 8);
    for (a, b) in [(3u32, 0u32), (2, 1), (1, 3), (4, 4)] {
        let m = mono(1, Basis::Complex, 8, vec![a], vec![b], 0, c(1.0, 0.0));
        let got = moyal_bracket(&h2, &m).unwrap();
        let want = m.scale(c(0.0, 1.7 * (a as f64 - b as f64)));
        assert!(got.distance(&want) < 1e-14, "{a},{b}");
    }
}

#[test]
fn poisson_sign_convention() {
    let pb = poisson_bracket(&x(4), &xi(4)).unwrap();
    assert!((pb.coeff(&Monomial::constant(1)) - c(-1.0, 0.0)).norm() < 1e-15);
    let h2 = harmonic(&[1.0, 3.0], Basis::Real, 6);
    assert!(poisson_bracket(&h2, &h2).unwrap().is_zero());
    // rotation flow of the oscillator: {p, z} = −i z
    let p = action(1, 0, Basis::Complex, 4);
    let z = mono(1, Basis::Complex, 4, vec![1], vec![0], 0, c(1.0, 0.0));
    let got = poisson_bracket(&p, &z).unwrap();
    assert!(got.distance(&z.scale(c(0.0, -1.0))) < 1e-15);
}

#[test]
fn coordinate_changes() {
    // x² + ξ² → z z̄
    let s = harmonic(&[2.0], Basis::Real, 4);
    let zc = change_coordinates(&s, Basis::Complex);
    assert_eq!(zc.len(), 1);
    assert!((zc.coeff(&Monomial::new(vec![1], vec![1], 0)) - c(1.0, 0.0)).norm() < 1e-15);
    // z → x + iξ
    let z = mono(1, Basis::Complex, 4, vec![1], vec![0], 0, c(1.0, 0.0));
    let r = change_coordinates(&z, Basis::Real);
    assert!((r.coeff(&Monomial::new(vec![1], vec![0], 0)) - c(1.0, 0.0)).norm() < 1e-15);
    assert!((r.coeff(&Monomial::new(vec![0], vec![1], 0)) - c(0.0, 1.0)).norm() < 1e-15);
}

#[test]
fn grade_decomposition() {
    let h2 = harmonic(&[1.0, 1.0], Basis::Real, 6);
    let parts = h2.grade_decompose();
    assert_eq!(parts.iter().filter(|p| !p.is_zero()).count(), 1);
    assert_eq!(parts[2], h2);

    let mut q = Poly::zero(1, Basis::Real, 6);
    q.add_term(Monomial::new(vec![4], vec![0], 0), c(1.0, 0.0));
    q.add_term(Monomial::new(vec![2], vec![0], 1), c(1.0, 0.0));
    let parts = q.grade_decompose();
    assert_eq!(parts[4].len(), 2);
    assert!(parts.iter().enumerate().all(|(m, p)| m == 4 || p.is_zero()));

    let h2const = mono(1, Basis::Real, 6, vec![0], vec![0], 2, c(1.0, 0.0));
    assert_eq!(h2const.grade_decompose()[4], h2const);
}

#[test]
fn evaluation() {
    let h2 = harmonic(&[1.0], Basis::Real, 4);
    assert_eq!(h2.evaluate(&PhasePoint::origin(1), 0.1).unwrap(), c(0.0, 0.0));
    let x2 = mono(1, Basis::Real, 4, vec![2], vec![0], 0, c(1.0, 0.0));
    let v = x2.evaluate(&PhasePoint::new(vec![2.0], vec![0.0]), 0.0).unwrap();
    assert_eq!(v, c(4.0, 0.0));
    let hx = mono(1, Basis::Real, 4, vec![1], vec![0], 1, c(1.0, 0.0));
    let v = hx.evaluate(&PhasePoint::new(vec![1.0], vec![0.0]), 0.5).unwrap();
    assert_eq!(v, c(0.5, 0.0));
    let zc = change_coordinates(&h2, Basis::Complex);
    assert!(zc.evaluate(&PhasePoint::origin(1), 0.1).is_err());
}

#[test]
fn loader_rejects_terms_above_cap() {
    let err = Poly::from_terms(
        1,
        Basis::Real,
        4,
        [(Monomial::new(vec![3], vec![0], 1), c(1.0, 0.0))],
    );
    assert!(err.is_err());
}

#[test]
fn exact_mode_commutator() {
    let one = ExactComplex::real(1, 1);
    let xe = Poly::monomial(1, Basis::Real, 4, Monomial::new(vec![1], vec![0], 0), one.clone());
    let xie = Poly::monomial(1, Basis::Real, 4, Monomial::new(vec![0], vec![1], 0), one.clone());
    let br = moyal_bracket(&xe, &xie).unwrap();
    assert_eq!(br, Poly::one(1, Basis::Real, 4));
}

// --- property tests ---------------------------------------------------------

fn arb_exact_poly(n: usize, basis: Basis, max_deg: u32, cap: u32) -> impl Strategy<Value = Poly<ExactComplex>> {
    let all: Vec<Monomial> = (0..=max_deg)
        .flat_map(|d| {
            let mut out = Vec::new();
            for j in 0..=d / 2 {
                let rest = d - 2 * j;
                for ab in indices_up_to(2 * n, rest).into_iter().filter(|m| m.order() == rest) {
                    out.push(Monomial::new(ab.0[..n].to_vec(), ab.0[n..].to_vec(), j));
                }
            }
            out
        })
        .collect();
    let len = all.len();
    proptest::collection::vec((0..len, -3i64..=3, -3i64..=3), 1..6).prop_map(move |picks| {
        let mut p = Poly::zero(n, basis, cap);
        for (idx, re, im) in picks {
            p.add_term(
                all[idx].clone(),
                ExactComplex::new(num_rational::Ratio::from_integer(re as i128), num_rational::Ratio::from_integer(im as i128)),
            );
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn star_is_associative_exactly(
        a in arb_exact_poly(2, Basis::Real, 3, 9),
        b in arb_exact_poly(2, Basis::Real, 3, 9),
        c3 in arb_exact_poly(2, Basis::Real, 3, 9),
    ) {
        let left = star_product(&star_product(&a, &b).unwrap(), &c3).unwrap();
        let right = star_product(&a, &star_product(&b, &c3).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn complex_star_matches_real_star(
        a in arb_exact_poly(1, Basis::Real, 4, 8),
        b in arb_exact_poly(1, Basis::Real, 4, 8),
    ) {
        let real = star_product(&a, &b).unwrap();
        let ac = change_coordinates(&a, Basis::Complex);
        let bc = change_coordinates(&b, Basis::Complex);
        let via_complex = change_coordinates(&star_product(&ac, &bc).unwrap(), Basis::Real);
        prop_assert_eq!(real, via_complex);
    }

    #[test]
    fn coordinate_round_trip_is_identity(a in arb_exact_poly(2, Basis::Real, 4, 8)) {
        let back = change_coordinates(&change_coordinates(&a, Basis::Complex), Basis::Real);
        prop_assert_eq!(back, a);
    }
}
