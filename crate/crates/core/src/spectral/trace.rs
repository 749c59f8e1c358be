use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sample::SpectrumSample;
use crate::error::{Error, Result};
use crate::normal_form::CanonicalForm;
use crate::symbol::MultiIndex;

/// Highest total order `|r|` handled symbolically by [`zelditch_term`].
pub const ZELDITCH_CAP: u32 = 8;

/// Plateau bump: 1 on `[−½, ½]`, 0 outside `(−1, 1)`, joined by a
/// polynomial smoothstep that is `C^order` at both ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub order: u32,
}

impl Default for Bump {
    fn default() -> Self {
        Bump { order: 3 }
    }
}

fn binom(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

impl Bump {
    /// Smoothstep `S_N` on `[0, 1]`: `S(0) = 0`, `S(1) = 1`, first `N`
    /// derivatives vanishing at both ends.
    pub fn smoothstep(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let n = self.order as u64;
        let mut acc = 0.0;
        for k in 0..=n {
            acc += binom(n + k, k) * binom(2 * n + 1, n - k) * (-x).powi(k as i32);
        }
        acc * x.powi(n as i32 + 1)
    }

    pub fn value(&self, s: f64) -> f64 {
        let a = s.abs();
        if a <= 0.5 {
            1.0
        } else if a >= 1.0 {
            0.0
        } else {
            self.smoothstep(2.0 * (1.0 - a))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceProbe {
    pub t: Complex64,
    pub eps: f64,
    pub rho: Bump,
}

impl TraceProbe {
    pub fn new(t: Complex64, eps: f64, rho: Bump) -> Result<Self> {
        check_time(t)?;
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::validation("eps", "must be positive"));
        }
        Ok(TraceProbe { t, eps, rho })
    }
}

fn check_time(t: Complex64) -> Result<()> {
    if !(t.im > 0.0 && t.re.is_finite() && t.im.is_finite()) {
        return Err(Error::validation("t", format!("Im t must be positive (got {t})")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceValue {
    pub value: Complex64,
    /// Bound on the part of the sum carried by the transition region
    /// `ε/2 < E < ε` of the bump, `Σ mult·e^{−Im t·E/ħ}` over it. The trace
    /// does not depend on the bump shape beyond this amount.
    pub tail_bound: f64,
}

/// `Σ ρ(E/ε) e^{itE/ħ}` over the sample, with multiplicities.
pub fn truncated_trace(sample: &SpectrumSample, probe: &TraceProbe) -> Result<TraceValue> {
    check_time(probe.t)?;
    if probe.eps > sample.e_cut && sample.entries.iter().any(|e| e.energy > probe.eps / 2.0) {
        return Err(Error::validation(
            "eps",
            format!(
                "ε = {} exceeds the sample cutoff {}; levels above the cutoff would be weighted",
                probe.eps, sample.e_cut
            ),
        ));
    }
    let i = Complex64::new(0.0, 1.0);
    let mut value = Complex64::new(0.0, 0.0);
    let mut tail = 0.0;
    for e in &sample.entries {
        let w = probe.rho.value(e.energy / probe.eps);
        if w == 0.0 {
            continue;
        }
        let phase = (i * probe.t * (e.energy / sample.hbar)).exp();
        value += phase * (w * e.multiplicity as f64);
        if e.energy > probe.eps / 2.0 {
            tail += e.multiplicity as f64 * phase.norm();
        }
    }
    Ok(TraceValue { value, tail_bound: tail })
}

/// `P_m` with `(w∂_w + ½)^m [1/(1−w)] = P_m(w)/(1−w)^{m+1}`, coefficients
/// in increasing powers of `w`.
fn generating_numerators(max: u32) -> Vec<Vec<f64>> {
    let mut out = vec![vec![1.0]];
    for m in 0..max as usize {
        let p = &out[m];
        let mut next = vec![0.0; p.len() + 1];
        for (j, &c) in p.iter().enumerate() {
            // w P'(1−w)
            if j > 0 {
                next[j] += j as f64 * c;
                next[j + 1] -= j as f64 * c;
            }
            // (m+1) w P
            next[j + 1] += (m + 1) as f64 * c;
            // ½ P (1−w)
            next[j] += 0.5 * c;
            next[j + 1] -= 0.5 * c;
        }
        out.push(next);
    }
    out
}

fn horner(p: &[f64], w: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c)
}

/// `Σ_k (k+½)^r e^{it u·(k+½)}` in closed form: the derivative
/// `(t⁻¹D_θ)^r` of `e^{itΣθ_j/2} / Π_j (1 − e^{itθ_j})` at `θ = u`.
pub fn zelditch_term(u: &[f64], r: &MultiIndex, t: Complex64) -> Result<Complex64> {
    check_time(t)?;
    if r.len() != u.len() {
        return Err(Error::validation("r", format!("expected {} entries", u.len())));
    }
    if r.order() > ZELDITCH_CAP {
        return Err(Error::validation(
            "r",
            format!("|r| = {} exceeds the symbolic cap {ZELDITCH_CAP}", r.order()),
        ));
    }
    let nums = generating_numerators(ZELDITCH_CAP);
    let i = Complex64::new(0.0, 1.0);
    let mut acc = Complex64::new(1.0, 0.0);
    for (&m, &uj) in r.iter().zip(u) {
        let w = (i * t * uj).exp();
        let half = (i * t * (uj / 2.0)).exp();
        acc *= half * horner(&nums[m as usize], w) / (Complex64::new(1.0, 0.0) - w).powu(m + 1);
    }
    Ok(acc)
}

type YPoly = BTreeMap<MultiIndex, Complex64>;

fn ypoly_mul(a: &YPoly, b: &YPoly) -> YPoly {
    let mut out = YPoly::new();
    for (ra, ca) in a {
        for (rb, cb) in b {
            *out.entry(ra.add(rb)).or_insert(Complex64::new(0.0, 0.0)) += ca * cb;
        }
    }
    out
}

/// ħ-expansion of the untruncated trace `Σ_k e^{itE_k/ħ}` through order
/// `ħ^order`: expanding `exp(it Σ_ℓ ħ^ℓ 𝔭_ℓ(k+½))` turns each power of
/// `(k+½)` into a [`zelditch_term`].
pub fn zelditch_expansion(cf: &CanonicalForm, hbar: f64, t: Complex64, order: u32) -> Result<Complex64> {
    check_time(t)?;
    let it = Complex64::new(0.0, 1.0) * t;
    // stage polynomials, index ℓ ↦ 𝔭_ℓ as a polynomial in y = k+½
    let stages: Vec<YPoly> = (0..=order)
        .map(|l| {
            cf.stage_coeffs(l)
                .into_iter()
                .map(|(r, c)| (r, Complex64::new(c, 0.0)))
                .collect()
        })
        .collect();
    // series[j] = coefficient of ħ^j in exp(it Σ ħ^ℓ 𝔭_ℓ); build by
    // accumulating powers X^m/m! with X = it Σ_{ℓ≥1} ħ^ℓ 𝔭_ℓ
    let one: YPoly = [(MultiIndex::zeros(cf.n), Complex64::new(1.0, 0.0))].into_iter().collect();
    let mut series: Vec<YPoly> = vec![YPoly::new(); order as usize + 1];
    series[0] = one.clone();
    let mut power: Vec<YPoly> = series.clone(); // X^m / m!, graded in ħ
    for m in 1..=order as usize {
        let mut next: Vec<YPoly> = vec![YPoly::new(); order as usize + 1];
        for (j, pj) in power.iter().enumerate() {
            for (l, stage) in stages.iter().enumerate().skip(1) {
                if j + l > order as usize || stage.is_empty() || pj.is_empty() {
                    continue;
                }
                for (r, c) in ypoly_mul(pj, stage) {
                    *next[j + l].entry(r).or_insert(Complex64::new(0.0, 0.0)) += c * it / m as f64;
                }
            }
        }
        for (j, p) in next.iter().enumerate() {
            for (r, c) in p {
                *series[j].entry(r.clone()).or_insert(Complex64::new(0.0, 0.0)) += c;
            }
        }
        power = next;
    }
    // the ℓ = 0 stage is ħ-independent and must vanish for a valid form
    if stages[0].values().any(|c| c.norm() > 0.0) {
        return Err(Error::validation("coeffs", "stage-0 coefficients must vanish"));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (j, p) in series.iter().enumerate() {
        for (r, c) in p {
            total += c * hbar.powi(j as i32) * zelditch_term(&cf.u, r, t)?;
        }
    }
    Ok(total)
}
