use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::lattice::{group_points, points_below, Cluster};
use super::sample::{Label, Source, SpectrumSample, MERGE_TOL};
use crate::error::{Error, Result};
use crate::normal_form::{CanonicalForm, ResonantResidual};
use crate::symbol::{weyl_to_normal, MultiIndex};

/// Lattice points are enumerated up to `ħν ≤ MARGIN·E_cut` so that levels
/// pushed down by `F` are not lost.
const MARGIN: f64 = 2.0;

fn check_inputs(cf: &CanonicalForm, hbar: f64, e_cut: f64) -> Result<()> {
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::validation("hbar", "must be positive"));
    }
    let ground = cf.energy(&MultiIndex::zeros(cf.n), hbar);
    let harmonic_ground = hbar * cf.u.iter().sum::<f64>() / 2.0;
    if !(e_cut > harmonic_ground.min(ground)) {
        return Err(Error::validation(
            "cutoff",
            format!("E_cut = {e_cut} is below the ground level {ground}"),
        ));
    }
    Ok(())
}

fn candidates(cf: &CanonicalForm, hbar: f64, e_cut: f64) -> Vec<(MultiIndex, f64)> {
    points_below(&cf.u, MARGIN * e_cut / hbar)
}

/// Guards against levels from beyond the enumerated region dropping under
/// the cutoff.
fn check_margin(cf: &CanonicalForm, hbar: f64, e_cut: f64, pts: &[(MultiIndex, f64)]) -> Result<()> {
    let edge = 0.75 * MARGIN * e_cut;
    for (k, v) in pts {
        if hbar * v > edge && cf.energy(k, hbar) <= e_cut {
            return Err(Error::numerical(format!(
                "level {} at ħν = {} falls below E_cut = {e_cut}: F is too large for this cutoff",
                k.dash_label(),
                hbar * v
            )));
        }
    }
    Ok(())
}

/// `E_k = ħ u·(k+½) + F(ħ(k+½), ħ)` for every lattice level below `E_cut`.
pub fn bnf_eigenvalues(cf: &CanonicalForm, hbar: f64, e_cut: f64) -> Result<SpectrumSample> {
    check_inputs(cf, hbar, e_cut)?;
    let pts = candidates(cf, hbar, e_cut);
    check_margin(cf, hbar, e_cut, &pts)?;
    let levels = pts
        .into_iter()
        .map(|(k, _)| (cf.energy(&k, hbar), Some(Label::Point(k))))
        .collect();
    SpectrumSample::from_levels(hbar, e_cut, levels, MERGE_TOL, Source::Lattice)
}

/// Hermitian block of `H₂ + F + K̂` on one cluster, in member order.
pub fn cluster_block(
    cf: &CanonicalForm,
    k_op: &crate::symbol::NormalOrdered,
    cluster: &Cluster,
    hbar: f64,
) -> Result<DMatrix<Complex64>> {
    let m = cluster.members.len();
    let mut block = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    for (b, kb) in cluster.members.iter().enumerate() {
        block[(b, b)] += Complex64::new(cf.energy(kb, hbar), 0.0);
        for (target, amp) in k_op.apply(kb, hbar) {
            match cluster.members.iter().position(|x| *x == target) {
                Some(a) => block[(a, b)] += amp,
                None => {
                    return Err(Error::numerical(format!(
                        "K couples {} to {} outside its cluster",
                        kb.dash_label(),
                        target.dash_label()
                    )))
                }
            }
        }
    }
    let scale = block.iter().map(|c| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let asym = (&block - block.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
    if asym > 1e-13 * scale {
        return Err(Error::numerical(format!(
            "cluster block at ν = {} is not Hermitian (defect {asym:e})",
            cluster.nu
        )));
    }
    Ok((&block + block.adjoint()).unscale(2.0))
}

/// Spectrum of `H₂ + F + K̂`: each resonant cluster block is diagonalised.
pub fn resonant_eigenvalues(
    cf: &CanonicalForm,
    residual: &ResonantResidual,
    hbar: f64,
    e_cut: f64,
) -> Result<SpectrumSample> {
    check_inputs(cf, hbar, e_cut)?;
    if residual.k.n() != cf.n {
        return Err(Error::validation("K", "dimension differs from the canonical form"));
    }
    let pts = candidates(cf, hbar, e_cut);
    check_margin(cf, hbar, e_cut, &pts)?;
    let clusters = group_points(&pts, &cf.resonance);
    if residual.is_zero() {
        let levels = pts
            .into_iter()
            .map(|(k, _)| (cf.energy(&k, hbar), Some(Label::Point(k))))
            .collect();
        return SpectrumSample::from_levels(hbar, e_cut, levels, MERGE_TOL, Source::Block);
    }
    let k_op = weyl_to_normal(&residual.k);
    let mut levels = Vec::new();
    for cluster in &clusters {
        if cluster.members.len() == 1 {
            let k = &cluster.members[0];
            levels.push((cf.energy(k, hbar), Some(Label::Point(k.clone()))));
            continue;
        }
        let block = cluster_block(cf, &k_op, cluster, hbar)?;
        let eig = SymmetricEigen::new(block);
        let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let below = vals.iter().filter(|&&e| e <= e_cut).count();
        if below != 0 && below != vals.len() {
            return Err(Error::validation(
                "cutoff",
                format!(
                    "the cluster at ν = {} straddles E_cut = {e_cut}; move the cutoff so the whole cluster lies on one side",
                    cluster.nu
                ),
            ));
        }
        let label = Label::Cluster(cluster.members.clone());
        levels.extend(vals.into_iter().map(|e| (e, Some(label.clone()))));
    }
    SpectrumSample::from_levels(hbar, e_cut, levels, MERGE_TOL, Source::Block)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::{resonance_order, FrequencyVector, ResonanceSpec};
    use crate::symbol::{Basis, Monomial, Poly};
    use std::collections::BTreeMap;

    fn quartic_cf() -> CanonicalForm {
        let mut coeffs = BTreeMap::new();
        coeffs.insert((MultiIndex(vec![2]), 0), 0.015);
        coeffs.insert((MultiIndex(vec![0]), 2), 0.00375);
        CanonicalForm {
            n: 1,
            u: vec![1.0],
            resonance: ResonanceSpec::NonResonant { bound: 10 },
            l_max: 3,
            coeffs,
        }
    }

    #[test]
    fn harmonic_ground_state() {
        let cf = CanonicalForm::harmonic(vec![1.0, 2f64.sqrt()], ResonanceSpec::NonResonant { bound: 10 }, 3);
        let s = bnf_eigenvalues(&cf, 0.1, 0.3).unwrap();
        assert!((s.entries[0].energy - 0.1 * (0.5 + 2f64.sqrt() / 2.0)).abs() < 1e-15);
        assert_eq!(s.entries[0].label, Some(Label::Point(MultiIndex(vec![0, 0]))));
        assert!(bnf_eigenvalues(&cf, 0.1, 0.1).is_err());
    }

    #[test]
    fn quartic_ground_state() {
        let s = bnf_eigenvalues(&quartic_cf(), 0.1, 0.2).unwrap();
        let want = 0.1 * 0.5 + 0.015 * (0.1f64 * 0.5).powi(2) + 0.00375 * 0.01;
        assert!((s.entries[0].energy - want).abs() < 1e-15);
        assert!((want - 0.0500750).abs() < 1e-12);
        let e1 = s.entries[1].energy;
        assert!(e1 > s.entries[0].energy);
    }

    fn one_two() -> (Vec<f64>, ResonanceSpec) {
        let u = vec![1.0, 2.0];
        let spec = resonance_order(&FrequencyVector::with_settings(u.clone(), vec![], 6, 1e-9).unwrap()).unwrap();
        (u, spec)
    }

    fn cubic_k(c: f64, spec: &ResonanceSpec) -> ResonantResidual {
        let mut k = Poly::zero(2, Basis::Complex, 6);
        k.add_term(Monomial::new(vec![2, 0], vec![0, 1], 0), Complex64::new(c, 0.0));
        k.add_term(Monomial::new(vec![0, 1], vec![2, 0], 0), Complex64::new(c, 0.0));
        ResonantResidual::new(k, spec).unwrap()
    }

    #[test]
    fn zero_residual_matches_lattice_formula() {
        let (u, spec) = one_two();
        let mut cf = CanonicalForm::harmonic(u, spec.clone(), 3);
        cf.coeffs.insert((MultiIndex(vec![1, 1]), 0), 0.01);
        let a = bnf_eigenvalues(&cf, 0.1, 0.9).unwrap();
        let b = resonant_eigenvalues(&cf, &ResonantResidual::empty(2, 6, Some(3)), 0.1, 0.9).unwrap();
        assert_eq!(a.entries, b.entries);
    }

    #[test]
    fn two_by_two_block_splitting() {
        let (u, spec) = one_two();
        let cf = CanonicalForm::harmonic(u, spec.clone(), 3);
        let c = 0.05;
        let hbar = 0.1;
        let s = resonant_eigenvalues(&cf, &cubic_k(c, &spec), hbar, 0.36).unwrap();
        // cluster {(0,1),(2,0)} at ν = 3.5
        let pair: Vec<f64> = s.entries.iter().map(|e| e.energy).filter(|e| (e - 0.35).abs() < 0.05).collect();
        assert_eq!(pair.len(), 2);
        // ⟨0,1| ẑ₁² ẑ₂† |2,0⟩-type element: √(2ħ·2)√(2ħ·1)√(2ħ·1)
        let off = c * (4.0 * hbar * 2.0 * hbar * 2.0 * hbar).sqrt();
        assert!(((pair[1] - pair[0]) - 2.0 * off).abs() < 1e-14);
        assert!(((pair[0] + pair[1]) / 2.0 - 0.35).abs() < 1e-14);
        // singleton untouched
        assert!((s.entries[0].energy - 0.15).abs() < 1e-15);
    }

    #[test]
    fn straddling_cluster_is_rejected() {
        let (u, spec) = one_two();
        let cf = CanonicalForm::harmonic(u, spec.clone(), 3);
        assert!(matches!(
            resonant_eigenvalues(&cf, &cubic_k(0.05, &spec), 0.1, 0.35),
            Err(Error::Validation { .. })
        ));
    }
}
