use std::fmt;

use crate::error::{Error, Result};
use crate::symbol::MultiIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Lattice,
    Block,
    Numeric,
}

/// Which lattice points an eigenvalue belongs to.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Label {
    Point(MultiIndex),
    /// Eigenvalue of a resonant block (or an exact coincidence) whose
    /// members are not individually resolvable.
    Cluster(Vec<MultiIndex>),
}

impl Label {
    pub fn members(&self) -> Vec<MultiIndex> {
        match self {
            Label::Point(k) => vec![k.clone()],
            Label::Cluster(ks) => ks.clone(),
        }
    }

    /// Points are dash-joined indices; cluster members are separated by `|`.
    pub fn parse(s: &str) -> Option<Label> {
        let parts: Option<Vec<MultiIndex>> = s.split('|').map(MultiIndex::parse_dash_label).collect();
        let mut parts = parts?;
        if parts.len() == 1 && !s.contains('|') {
            return parts.pop().map(Label::Point);
        }
        Some(Label::Cluster(parts))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Point(k) => write!(f, "{}", k.dash_label()),
            Label::Cluster(ks) => {
                let s: Vec<String> = ks.iter().map(|k| k.dash_label()).collect();
                write!(f, "{}", s.join("|"))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub energy: f64,
    pub multiplicity: u32,
    pub label: Option<Label>,
}

/// Eigenvalues below `e_cut` at one value of ħ.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSample {
    pub hbar: f64,
    pub e_cut: f64,
    pub entries: Vec<SpectrumEntry>,
    pub source: Source,
}

/// Relative tolerance under which two computed energies count as one level.
pub const MERGE_TOL: f64 = 1e-12;

impl SpectrumSample {
    /// Sorts raw `(energy, label)` pairs, merges coincident energies into
    /// one entry with multiplicity, and drops everything above `e_cut`.
    pub fn from_levels(
        hbar: f64,
        e_cut: f64,
        mut levels: Vec<(f64, Option<Label>)>,
        merge_tol: f64,
        source: Source,
    ) -> Result<Self> {
        if let Some((e, _)) = levels.iter().find(|(e, _)| !e.is_finite()) {
            return Err(Error::numerical(format!("non-finite energy {e}")));
        }
        levels.retain(|(e, _)| *e <= e_cut);
        levels.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        let mut entries: Vec<SpectrumEntry> = Vec::new();
        let mut members: Vec<Vec<MultiIndex>> = Vec::new();
        let mut unlabeled: Vec<bool> = Vec::new();
        for (e, label) in levels {
            if let Some(last) = entries.last_mut() {
                if (e - last.energy).abs() <= merge_tol * e.abs().max(last.energy.abs()) {
                    last.multiplicity += 1;
                    let i = entries.len() - 1;
                    match label {
                        Some(l) => members[i].extend(l.members()),
                        None => unlabeled[i] = true,
                    }
                    continue;
                }
            }
            unlabeled.push(label.is_none());
            members.push(label.map(|l| l.members()).unwrap_or_default());
            entries.push(SpectrumEntry {
                energy: e,
                multiplicity: 1,
                label: None,
            });
        }
        for (i, entry) in entries.iter_mut().enumerate() {
            if unlabeled[i] {
                continue;
            }
            let mut ks = std::mem::take(&mut members[i]);
            ks.sort();
            ks.dedup();
            entry.label = Some(if ks.len() == 1 {
                Label::Point(ks.pop().expect("one member"))
            } else {
                Label::Cluster(ks)
            });
        }
        let sample = SpectrumSample {
            hbar,
            e_cut,
            entries,
            source,
        };
        sample.validate()?;
        Ok(sample)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::validation("hbar", "must be positive and finite"));
        }
        let mut prev = f64::NEG_INFINITY;
        for (i, e) in self.entries.iter().enumerate() {
            if !e.energy.is_finite() {
                return Err(Error::validation(format!("entries[{i}].energy"), "not finite"));
            }
            if e.energy <= prev {
                return Err(Error::validation(
                    format!("entries[{i}].energy"),
                    "energies must be strictly increasing",
                ));
            }
            if e.energy > self.e_cut {
                return Err(Error::validation(
                    format!("entries[{i}].energy"),
                    format!("energy {} exceeds E_cut {}", e.energy, self.e_cut),
                ));
            }
            if e.multiplicity == 0 {
                return Err(Error::validation(format!("entries[{i}].multiplicity"), "must be ≥ 1"));
            }
            prev = e.energy;
        }
        Ok(())
    }

    /// Number of levels counted with multiplicity.
    pub fn count(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity as usize).sum()
    }

    /// Energies repeated according to multiplicity.
    pub fn energies(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.energy, e.multiplicity as usize))
            .collect()
    }
}
