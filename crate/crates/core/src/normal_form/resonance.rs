//! Integer relations among the frequencies and the resonance order `d`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Frequencies `u` of the quadratic part together with resonance-detection
/// settings.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyVector {
    pub u: Vec<f64>,
    /// Relations asserted by the caller; when present they replace the
    /// floating-point test.
    pub declared_relations: Vec<Vec<i64>>,
    pub detection_bound: u32,
    pub detection_tol: f64,
}

pub const DEFAULT_DETECTION_BOUND: u32 = 10;
pub const DEFAULT_DETECTION_TOL: f64 = 1e-9;

impl FrequencyVector {
    pub fn new(u: Vec<f64>) -> Result<Self> {
        Self::with_settings(u, Vec::new(), DEFAULT_DETECTION_BOUND, DEFAULT_DETECTION_TOL)
    }

    pub fn with_settings(
        u: Vec<f64>,
        declared_relations: Vec<Vec<i64>>,
        detection_bound: u32,
        detection_tol: f64,
    ) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::validation("u", "at least one frequency is required"));
        }
        for (i, &ui) in u.iter().enumerate() {
            if !(ui.is_finite() && ui > 0.0) {
                return Err(Error::validation(
                    format!("u[{i}]"),
                    format!("frequency must be positive and finite, got {ui}"),
                ));
            }
        }
        if !(detection_tol.is_finite() && detection_tol >= 0.0) {
            return Err(Error::validation("detection_tol", "must be a non-negative number"));
        }
        let fv = FrequencyVector {
            u,
            declared_relations,
            detection_bound,
            detection_tol,
        };
        for (i, rel) in fv.declared_relations.iter().enumerate() {
            if rel.len() != fv.n() || rel.iter().all(|&a| a == 0) {
                return Err(Error::validation(
                    format!("declared_relations[{i}]"),
                    "relation must be a nonzero vector of length n",
                ));
            }
            if !fv.nearly_resonant(rel) {
                return Err(Error::validation(
                    format!("declared_relations[{i}]"),
                    format!("α·u = {:e} is not zero within tolerance", fv.dot(rel)),
                ));
            }
        }
        Ok(fv)
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn max(&self) -> f64 {
        self.u.iter().cloned().fold(0.0, f64::max)
    }

    pub fn dot(&self, alpha: &[i64]) -> f64 {
        alpha.iter().zip(&self.u).map(|(&a, &u)| a as f64 * u).sum()
    }

    /// `|α·u| ≤ tol·|α|·max(u)`.
    pub fn nearly_resonant(&self, alpha: &[i64]) -> bool {
        let norm: i64 = alpha.iter().map(|a| a.abs()).sum();
        self.dot(alpha).abs() <= self.detection_tol * norm as f64 * self.max()
    }
}

/// Outcome of the relation search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ResonanceSpec {
    /// No relation with `|α| ≤ bound`.
    NonResonant { bound: u32 },
    /// `d` is the minimal `|α|`; `relations` is a ℚ-basis of the relation
    /// module found within the bound.
    Resonant {
        bound: u32,
        d: u32,
        relations: Vec<Vec<i64>>,
    },
}

impl ResonanceSpec {
    pub fn is_resonant(&self) -> bool {
        matches!(self, ResonanceSpec::Resonant { .. })
    }

    pub fn order(&self) -> Option<u32> {
        match self {
            ResonanceSpec::NonResonant { .. } => None,
            ResonanceSpec::Resonant { d, .. } => Some(*d),
        }
    }

    pub fn bound(&self) -> u32 {
        match self {
            ResonanceSpec::NonResonant { bound } | ResonanceSpec::Resonant { bound, .. } => *bound,
        }
    }

    pub fn relations(&self) -> &[Vec<i64>] {
        match self {
            ResonanceSpec::NonResonant { .. } => &[],
            ResonanceSpec::Resonant { relations, .. } => relations,
        }
    }

    /// Exact test `u·δ = 0`: `δ` lies in the rational span of the relation
    /// basis (`δ = 0` in the non-resonant case).
    pub fn annihilates(&self, delta: &[i64]) -> bool {
        if delta.iter().all(|&x| x == 0) {
            return true;
        }
        let rels = self.relations();
        if rels.is_empty() {
            return false;
        }
        let mut rows: Vec<Vec<i64>> = rels.to_vec();
        let base = integer_rank(&rows);
        rows.push(delta.to_vec());
        integer_rank(&rows) == base
    }
}

/// Rank of an integer matrix by fraction-free elimination.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let (a, b) = (m[rank][col], m[r][col]);
                for c in 0..cols {
                    m[r][c] = m[r][c] * a - m[rank][c] * b;
                }
                let g = m[r].iter().fold(0i128, |g, &x| gcd(g, x.abs()));
                if g > 1 {
                    m[r].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Nonzero integer vectors with `|α| ≤ bound` whose first nonzero entry
/// is positive, ordered by `|α|`.
pub fn relation_candidates(n: usize, bound: u32) -> Vec<Vec<i64>> {
    let mut by_norm: Vec<Vec<Vec<i64>>> = vec![Vec::new(); bound as usize + 1];
    let mut cur = vec![0i64; n];
    fn rec(i: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<Vec<i64>>>) {
        if i == cur.len() {
            let norm: i64 = cur.iter().map(|a| a.abs()).sum();
            let first = cur.iter().find(|&&a| a != 0);
            if let Some(&f) = first {
                if f > 0 {
                    out[norm as usize].push(cur.clone());
                }
            }
            return;
        }
        for a in -left..=left {
            cur[i] = a;
            rec(i + 1, left - a.abs(), cur, out);
        }
        cur[i] = 0;
    }
    rec(0, bound as i64, &mut cur, &mut by_norm);
    by_norm.into_iter().flatten().collect()
}

/// Exhaustive search for the resonance order.
pub fn resonance_order(freq: &FrequencyVector) -> Result<ResonanceSpec> {
    let bound = freq.detection_bound;
    if bound < 2 {
        return Err(Error::validation("bound", "detection bound must be at least 2"));
    }
    let n = freq.n();
    let declared = if freq.declared_relations.is_empty() {
        None
    } else {
        Some(ResonanceSpec::Resonant {
            bound,
            d: 0,
            relations: freq.declared_relations.clone(),
        })
    };
    let mut d = None;
    let mut basis: Vec<Vec<i64>> = Vec::new();
    for alpha in relation_candidates(n, bound) {
        let hit = match &declared {
            Some(spec) => spec.annihilates(&alpha),
            None => freq.nearly_resonant(&alpha),
        };
        if !hit {
            continue;
        }
        let norm: u32 = alpha.iter().map(|a| a.unsigned_abs() as u32).sum();
        d.get_or_insert(norm);
        let mut trial = basis.clone();
        trial.push(alpha.clone());
        if integer_rank(&trial) > basis.len() {
            basis = trial;
        }
        if basis.len() == n {
            return Err(Error::validation(
                "detection_tol",
                format!(
                    "relations span all of Z^{n}, which no positive frequency vector allows; tolerance {} is too loose",
                    freq.detection_tol
                ),
            ));
        }
    }
    Ok(match d {
        None => ResonanceSpec::NonResonant { bound },
        Some(d) => ResonanceSpec::Resonant {
            bound,
            d,
            relations: basis,
        },
    })
}
