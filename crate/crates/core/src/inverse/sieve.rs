use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{least_squares, COND_CAP};
use crate::normal_form::ResonanceSpec;
use crate::spectral::{group_points, points_below, Bump, Cluster};

/// `Ṽ_ℓ(ε) = Σ_k 𝔭_ℓ(k) ρ(u·(k+½)/ε)` on a grid of `ε`, per stage `ℓ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SieveData {
    pub eps: Vec<f64>,
    pub rho: Bump,
    pub values: BTreeMap<u32, Vec<f64>>,
}

impl SieveData {
    pub fn validate(&self) -> Result<()> {
        if self.eps.is_empty() {
            return Err(Error::validation("eps", "empty ε grid"));
        }
        if self.eps[0] <= 0.0 || self.eps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::validation("eps", "ε grid must be positive and strictly increasing"));
        }
        for (l, v) in &self.values {
            if v.len() != self.eps.len() {
                return Err(Error::validation(format!("values[{l}]"), "one value per ε required"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SieveSolution {
    pub clusters: Vec<Cluster>,
    /// Cluster sums of `𝔭_ℓ`, one per cluster.
    pub values: Vec<f64>,
    pub residual: f64,
    pub cond: f64,
}

/// Clusters that any `ε` of the grid can see (`ν < ε_max`).
pub fn sieve_clusters(u: &[f64], spec: &ResonanceSpec, eps_max: f64) -> Vec<Cluster> {
    let pts: Vec<_> = points_below(u, eps_max).into_iter().filter(|(_, v)| *v < eps_max).collect();
    group_points(&pts, spec)
}

/// Forward model: `Ṽ(ε_t) = Σ_s v_s ρ(ν_s/ε_t)` for cluster values `v_s`.
pub fn sieve_forward(clusters: &[Cluster], values: &[f64], eps: &[f64], rho: Bump) -> Vec<f64> {
    eps.iter()
        .map(|&e| clusters.iter().zip(values).map(|(c, v)| v * rho.value(c.nu / e)).sum())
        .collect()
}

/// Solves `A v = Ṽ_ℓ`, `A[t][s] = ρ(ν_s/ε_t)`, by least squares for the
/// cluster values; a single linear system in place of successive
/// subtraction at growing `ε`.
pub fn sieve_values(sieve: &SieveData, u: &[f64], spec: &ResonanceSpec, l: u32) -> Result<SieveSolution> {
    sieve.validate()?;
    let data = sieve
        .values
        .get(&l)
        .ok_or_else(|| Error::validation("values", format!("no sieve data for stage {l}")))?;
    let eps_max = sieve.eps[sieve.eps.len() - 1];
    let clusters = sieve_clusters(u, spec, eps_max);
    let m = clusters.len();
    let hint = |c: &[Cluster]| {
        let lo = c.first().map(|c| c.nu).unwrap_or(0.0);
        let hi = c.last().map(|c| c.nu).unwrap_or(0.0);
        format!("use at least {m} ε values spread over [{lo:.4}, {:.4}] so every level crosses the bump transition", 2.0 * hi)
    };
    if sieve.eps.len() < m {
        return Err(Error::numerical(format!(
            "ε grid too coarse: {} values for {m} unknown levels; {}",
            sieve.eps.len(),
            hint(&clusters)
        )));
    }
    let a = DMatrix::from_fn(sieve.eps.len(), m, |t, s| sieve.rho.value(clusters[s].nu / sieve.eps[t]));
    let b = DVector::from_column_slice(data);
    let ls = least_squares(&a, &b, COND_CAP, "sieve").map_err(|e| Error::numerical(format!("{e}; {}", hint(&clusters))))?;
    Ok(SieveSolution {
        clusters,
        values: ls.x.iter().copied().collect(),
        residual: ls.residual,
        cond: ls.cond,
    })
}
