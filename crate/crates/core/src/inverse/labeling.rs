use crate::error::{Error, Result};
use crate::normal_form::ResonanceSpec;
use crate::spectral::{group_points, points_below, SpectrumSample};
use crate::symbol::MultiIndex;

/// Levels of one sample assigned to one cluster of lattice points (a
/// single point in the non-resonant case).
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledGroup {
    pub members: Vec<MultiIndex>,
    pub nu: f64,
    pub energies: Vec<f64>,
}

impl LabeledGroup {
    /// `Σ E / ħ − Σ ν` over the group: the cluster sum of `E_k/ħ − u·(k+½)`.
    pub fn residual(&self, hbar: f64) -> f64 {
        self.energies.iter().map(|e| e / hbar).sum::<f64>() - self.nu * self.members.len() as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample {
    pub hbar: f64,
    pub groups: Vec<LabeledGroup>,
    /// Levels at the top of the sample left unassigned because their
    /// cluster was cut by the cutoff.
    pub dropped: usize,
}

impl LabeledSample {
    pub fn find(&self, members: &[MultiIndex]) -> Option<&LabeledGroup> {
        self.groups.iter().find(|g| g.members == members)
    }
}

/// Relative distance under which two unperturbed levels are considered
/// coincident in the non-resonant case.
pub const MATCHING_TOL: f64 = 1e-9;

/// Assigns sorted energies to lattice clusters sorted by `ν`, one energy per
/// member. Only correct while the perturbation preserves the order of the
/// unperturbed levels.
pub fn label_lattice(sample: &SpectrumSample, u: &[f64], spec: &ResonanceSpec) -> Result<LabeledSample> {
    let energies = sample.energies();
    if energies.is_empty() {
        return Err(Error::validation("spectra", format!("ħ = {}: empty spectrum", sample.hbar)));
    }
    let top = energies[energies.len() - 1].max(sample.e_cut);
    let points = points_below(u, 1.5 * top / sample.hbar);
    let clusters = group_points(&points, spec);
    if !spec.is_resonant() {
        for w in points.windows(2) {
            if (w[1].1 - w[0].1).abs() <= MATCHING_TOL * w[0].1 {
                return Err(Error::numerical(format!(
                    "levels {} and {} have coincident ν = {}; the frequencies look resonant, run resonance detection",
                    w[0].0.dash_label(),
                    w[1].0.dash_label(),
                    w[0].1
                )));
            }
        }
    }
    let mut groups = Vec::new();
    let mut next = 0;
    let mut lattice_exhausted = true;
    for c in clusters {
        let size = c.members.len();
        if next + size > energies.len() {
            lattice_exhausted = false;
            break;
        }
        groups.push(LabeledGroup {
            members: c.members,
            nu: c.nu,
            energies: energies[next..next + size].to_vec(),
        });
        next += size;
    }
    let dropped = energies.len() - next;
    if dropped > 0 && lattice_exhausted {
        return Err(Error::numerical(format!(
            "ħ = {}: {dropped} levels left over after exhausting the lattice below ħν = {}; cutoff inconsistent with the frequencies",
            sample.hbar,
            1.5 * top
        )));
    }
    Ok(LabeledSample {
        hbar: sample.hbar,
        groups,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::{resonance_order, CanonicalForm, FrequencyVector};
    use crate::spectral::{bnf_eigenvalues, Label};

    fn k(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn third_level_of_irrational_pair() {
        let u = vec![1.0, 2f64.sqrt()];
        let spec = ResonanceSpec::NonResonant { bound: 10 };
        let cf = CanonicalForm::harmonic(u.clone(), spec.clone(), 3);
        let s = bnf_eigenvalues(&cf, 0.1, 1.0).unwrap();
        let l = label_lattice(&s, &u, &spec).unwrap();
        assert_eq!(l.groups[2].members, vec![k(&[0, 1])]);
        assert_eq!(l.dropped, 0);
        for (g, e) in l.groups.iter().zip(&s.entries) {
            assert_eq!(Some(Label::Point(g.members[0].clone())), e.label);
        }
    }

    #[test]
    fn resonant_cluster_labels() {
        let u = vec![1.0, 2.0];
        let spec = resonance_order(&FrequencyVector::with_settings(u.clone(), vec![], 6, 1e-9).unwrap()).unwrap();
        let cf = CanonicalForm::harmonic(u.clone(), spec.clone(), 3);
        let s = bnf_eigenvalues(&cf, 0.1, 0.62).unwrap();
        let l = label_lattice(&s, &u, &spec).unwrap();
        let g = l.groups.iter().find(|g| g.nu == 3.5).unwrap();
        assert_eq!(g.members, vec![k(&[0, 1]), k(&[2, 0])]);
        assert!((g.energies[0] - 0.35).abs() < 1e-15);
        assert!(g.residual(0.1).abs() < 1e-13);
    }

    #[test]
    fn resonant_frequencies_in_non_resonant_mode_are_rejected() {
        let u = vec![1.0, 2.0];
        let spec = ResonanceSpec::NonResonant { bound: 10 };
        let cf = CanonicalForm::harmonic(u.clone(), spec.clone(), 3);
        let s = bnf_eigenvalues(&cf, 0.1, 1.0).unwrap();
        assert!(label_lattice(&s, &u, &spec).is_err());
    }

    #[test]
    fn wrong_frequencies_leave_levels_over() {
        let u = vec![1.0, 2f64.sqrt()];
        let spec = ResonanceSpec::NonResonant { bound: 10 };
        let cf = CanonicalForm::harmonic(u, spec.clone(), 3);
        let s = bnf_eigenvalues(&cf, 0.1, 2.0).unwrap();
        assert!(label_lattice(&s, &[5.0, 7.0f64.sqrt() * 3.0], &spec).is_err());
    }
}
