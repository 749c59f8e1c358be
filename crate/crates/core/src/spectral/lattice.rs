use crate::error::{Error, Result};
use crate::normal_form::ResonanceSpec;
use crate::symbol::MultiIndex;

/// Lattice points sharing one unperturbed level `ν = u·(k+½)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub nu: f64,
    pub members: Vec<MultiIndex>,
}

pub fn nu(u: &[f64], k: &MultiIndex) -> f64 {
    k.iter().zip(u).map(|(&e, &w)| w * (e as f64 + 0.5)).sum()
}

/// All `k ∈ ℤ₊ⁿ` with `u·(k+½) ≤ nu_max`, sorted by `ν` then `k`.
pub fn points_below(u: &[f64], nu_max: f64) -> Vec<(MultiIndex, f64)> {
    fn rec(u: &[f64], room: f64, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        let j = prefix.len();
        if j == u.len() {
            out.push(MultiIndex(prefix.clone()));
            return;
        }
        let mut e = 0u32;
        while (e as f64) * u[j] <= room {
            prefix.push(e);
            rec(u, room - e as f64 * u[j], prefix, out);
            prefix.pop();
            e += 1;
        }
    }
    let base: f64 = u.iter().sum::<f64>() / 2.0;
    let mut ks = Vec::new();
    if nu_max >= base {
        // a hair of slack so that points exactly on the boundary survive the
        // subtraction order; the exact test below decides.
        rec(u, nu_max - base + 1e-12 * nu_max.abs(), &mut Vec::new(), &mut ks);
    }
    let mut out: Vec<(MultiIndex, f64)> = ks
        .into_iter()
        .map(|k| {
            let v = nu(u, &k);
            (k, v)
        })
        .filter(|(_, v)| *v <= nu_max)
        .collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    out
}

fn check_frequencies(u: &[f64]) -> Result<()> {
    if u.is_empty() {
        return Err(Error::validation("u", "no frequencies"));
    }
    for (j, w) in u.iter().enumerate() {
        if !(w.is_finite() && *w > 0.0) {
            return Err(Error::validation(format!("u[{j}]"), "frequencies must be positive"));
        }
    }
    Ok(())
}

fn check_cutoff(u: &[f64], hbar: f64, e_cut: f64) -> Result<()> {
    check_frequencies(u)?;
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::validation("hbar", "must be positive"));
    }
    let ground = hbar * u.iter().sum::<f64>() / 2.0;
    if !(e_cut > ground) {
        return Err(Error::validation(
            "cutoff",
            format!("E_cut = {e_cut} is not above the ground level ħu·½ = {ground}"),
        ));
    }
    Ok(())
}

/// Lattice points with `ħ u·(k+½) ≤ E_cut`.
pub fn lattice_points(u: &[f64], hbar: f64, e_cut: f64) -> Result<Vec<(MultiIndex, f64)>> {
    check_cutoff(u, hbar, e_cut)?;
    Ok(points_below(u, e_cut / hbar))
}

/// Groups points that differ by an integer relation of `u`. Input must be
/// sorted by `ν`.
pub fn group_points(points: &[(MultiIndex, f64)], spec: &ResonanceSpec) -> Vec<Cluster> {
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut start = 0;
    while start < points.len() {
        // float window first, exact relation test second
        let nu0 = points[start].1;
        let mut end = start + 1;
        while end < points.len() && (points[end].1 - nu0).abs() <= 1e-9 * nu0.abs().max(1.0) {
            end += 1;
        }
        let mut window: Vec<Cluster> = Vec::new();
        for (k, v) in &points[start..end] {
            let home = window
                .iter_mut()
                .find(|c| spec.annihilates(&k.diff(&c.members[0])));
            match home {
                Some(c) => c.members.push(k.clone()),
                None => window.push(Cluster {
                    nu: *v,
                    members: vec![k.clone()],
                }),
            }
        }
        clusters.extend(window);
        start = end;
    }
    clusters
}

/// Clusters of lattice points below `E_cut`, ordered by `ν`.
pub fn cluster_partition(u: &[f64], spec: &ResonanceSpec, hbar: f64, e_cut: f64) -> Result<Vec<Cluster>> {
    let points = lattice_points(u, hbar, e_cut)?;
    Ok(group_points(&points, spec))
}

/// Checks that `k ↦ u·(k+½)` is injective on the points with `|k| < d/2`
/// (and `|k| ≤ max_order`); returns an offending pair otherwise. Small
/// points may still share `ν` with points of order `≥ d/2`.
pub fn injectivity_violation(u: &[f64], d: u32, max_order: u32) -> Option<(MultiIndex, MultiIndex)> {
    let small: Vec<MultiIndex> = crate::symbol::indices_up_to(u.len(), max_order)
        .into_iter()
        .filter(|k| 2 * k.order() < d)
        .collect();
    for (i, k) in small.iter().enumerate() {
        for k2 in &small[i + 1..] {
            if (nu(u, k) - nu(u, k2)).abs() <= 1e-12 * nu(u, k) {
                return Some((k.clone(), k2.clone()));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::{resonance_order, FrequencyVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn only_ground_state_below_small_cutoff() {
        let pts = lattice_points(&[1.0, 2f64.sqrt()], 0.1, 0.13).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].0, k(&[0, 0]));
        assert!(lattice_points(&[1.0], 0.1, 0.04).is_err());
    }

    #[test]
    fn matches_brute_force_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let n = rng.random_range(1..=3);
            let u: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..3.0)).collect();
            let hbar = rng.random_range(0.05..0.5);
            let e_cut = hbar * rng.random_range(2.0..12.0);
            let pts = lattice_points(&u, hbar, e_cut).unwrap();
            let mut brute = 0;
            let m = 40u32;
            let mut idx = vec![0u32; n];
            loop {
                if hbar * nu(&u, &MultiIndex(idx.clone())) <= e_cut {
                    brute += 1;
                }
                let mut j = 0;
                while j < n {
                    idx[j] += 1;
                    if idx[j] <= m {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == n {
                    break;
                }
            }
            assert_eq!(pts.len(), brute);
        }
    }

    fn spec_for(u: &[f64], bound: u32) -> ResonanceSpec {
        resonance_order(&FrequencyVector::with_settings(u.to_vec(), vec![], bound, 1e-9).unwrap()).unwrap()
    }

    #[test]
    fn one_two_clusters() {
        let u = [1.0, 2.0];
        let spec = spec_for(&u, 6);
        let cl = cluster_partition(&u, &spec, 1.0, 3.6).unwrap();
        assert_eq!(cl[0].members, vec![k(&[0, 0])]);
        assert_eq!(cl[0].nu, 1.5);
        let c35 = cl.iter().find(|c| c.nu == 3.5).unwrap();
        assert_eq!(c35.members, vec![k(&[0, 1]), k(&[2, 0])]);
    }

    #[test]
    fn small_points_never_share_clusters() {
        for u in [[1.0, 2.0], [1.0, 3.0], [2.0, 3.0]] {
            let spec = spec_for(&u, 8);
            let d = spec.order().unwrap();
            assert!(injectivity_violation(&u, d, 3 * d).is_none());
            let cl = cluster_partition(&u, &spec, 1.0, 3.0 * d as f64 * 3.0).unwrap();
            for c in &cl {
                assert!(c.members.iter().filter(|m| 2 * m.order() < d).count() <= 1);
            }
        }
        // overstating d breaks it: (1,0) and (0,1) collide for u = (1,1)
        assert!(injectivity_violation(&[1.0, 1.0], 3, 3).is_some());
    }
}
