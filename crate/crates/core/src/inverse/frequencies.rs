use crate::error::{Error, Result};
use crate::spectral::SpectrumSample;

#[derive(Clone, Debug)]
pub struct FrequencyOptions {
    /// Relative tolerance for grouping gaps and matching them against
    /// integer combinations of accepted frequencies.
    pub tol: f64,
    /// Relative spread under which a group of gaps counts as exactly
    /// degenerate.
    pub exact_tol: f64,
}

impl Default for FrequencyOptions {
    fn default() -> Self {
        FrequencyOptions {
            tol: 1e-2,
            exact_tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyEstimate {
    /// Extrapolated to `ħ = 0`.
    pub u: Vec<f64>,
    /// Raw per-sample estimates, in sample order.
    pub per_sample: Vec<Vec<f64>>,
}

/// Number of nonzero `m ∈ ℤ₊^len` with `m·acc` inside `[lo, hi]`.
fn combination_count(acc: &[f64], lo: f64, hi: f64) -> (usize, f64) {
    fn rec(acc: &[f64], j: usize, sum: f64, nonzero: bool, lo: f64, hi: f64, out: &mut (usize, f64)) {
        if j == acc.len() {
            if nonzero && sum >= lo && sum <= hi {
                out.0 += 1;
                out.1 += sum;
            }
            return;
        }
        let mut m = 0u32;
        loop {
            let s = sum + m as f64 * acc[j];
            if s > hi {
                break;
            }
            rec(acc, j + 1, s, nonzero || m > 0, lo, hi, out);
            m += 1;
        }
    }
    let mut out = (0, 0.0);
    rec(acc, 0, 0.0, false, lo, hi, &mut out);
    out
}

/// Frequencies from one spectrum: scan ground-state gaps `(E_i − E_0)/ħ`
/// in increasing order; a group of nearly equal gaps larger than the number
/// of integer combinations of already accepted frequencies that land in it
/// contributes new frequencies.
pub fn frequencies_from_gaps(sample: &SpectrumSample, n: usize, options: &FrequencyOptions) -> Result<Vec<f64>> {
    let e = sample.energies();
    if e.len() < n + 1 {
        return Err(Error::validation(
            "spectra",
            format!("ħ = {}: need at least {} levels, found {}", sample.hbar, n + 1, e.len()),
        ));
    }
    let gaps: Vec<f64> = e[1..].iter().map(|x| (x - e[0]) / sample.hbar).collect();
    let mut accepted: Vec<f64> = Vec::new();
    let mut i = 0;
    while i < gaps.len() && accepted.len() < n {
        let g0 = gaps[i];
        let mut j = i + 1;
        while j < gaps.len() && gaps[j] - g0 <= options.tol * g0.max(1.0) {
            j += 1;
        }
        let group = &gaps[i..j];
        // a window that covers the whole group
        let lo = g0 - options.tol * g0.max(1.0);
        let hi = group[group.len() - 1] + options.tol * g0.max(1.0);
        let (predicted, predicted_sum) = combination_count(&accepted, lo, hi);
        if group.len() > predicted {
            let fresh = group.len() - predicted;
            let spread = group[group.len() - 1] - group[0];
            if fresh > 1 && spread > options.exact_tol * g0.max(1.0) {
                return Err(Error::numerical(format!(
                    "ħ = {}: gaps {:?} are not independent at tolerance {}; tighten the tolerance or supply the frequencies",
                    sample.hbar, group, options.tol
                )));
            }
            // sum of the group minus the combinations it contains is
            // polynomial in ħ even when the group is split by a residual
            let total: f64 = group.iter().sum();
            let value = (total - predicted_sum) / fresh as f64;
            for _ in 0..fresh.min(n - accepted.len()) {
                accepted.push(value);
            }
        }
        i = j;
    }
    if accepted.len() < n {
        return Err(Error::numerical(format!(
            "ħ = {}: only {} independent gaps found, {n} needed; raise the cutoff",
            sample.hbar,
            accepted.len()
        )));
    }
    accepted.sort_by(f64::total_cmp);
    Ok(accepted)
}

/// Value at `x = 0` of the interpolating polynomial through `(x_i, y_i)`.
pub fn neville_at_zero(x: &[f64], y: &[f64]) -> f64 {
    let mut p = y.to_vec();
    let m = x.len();
    for level in 1..m {
        for i in 0..m - level {
            let (xi, xj) = (x[i], x[i + level]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

/// Frequencies from spectra at several `ħ`, each gap estimate carrying a
/// bias polynomial in `ħ` that polynomial extrapolation to `ħ = 0` removes.
pub fn recover_frequencies(
    samples: &[SpectrumSample],
    n: usize,
    options: &FrequencyOptions,
) -> Result<FrequencyEstimate> {
    if samples.len() < 2 {
        return Err(Error::validation("spectra", "need spectra at two or more values of ħ"));
    }
    if n == 0 {
        return Err(Error::validation("dimension", "must be at least 1"));
    }
    let per_sample: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| frequencies_from_gaps(s, n, options))
        .collect::<Result<_>>()?;
    let hbars: Vec<f64> = samples.iter().map(|s| s.hbar).collect();
    for i in 0..hbars.len() {
        for j in i + 1..hbars.len() {
            if hbars[i] == hbars[j] {
                return Err(Error::validation("spectra", format!("duplicate ħ = {}", hbars[i])));
            }
        }
    }
    let u: Vec<f64> = (0..n)
        .map(|j| {
            let ys: Vec<f64> = per_sample.iter().map(|v| v[j]).collect();
            neville_at_zero(&hbars, &ys)
        })
        .collect();
    for (s, est) in samples.iter().zip(&per_sample) {
        for j in 0..n {
            if (est[j] - u[j]).abs() > options.tol * u[j].abs().max(1.0) {
                return Err(Error::numerical(format!(
                    "frequency {j}: estimate {} at ħ = {} is inconsistent with the extrapolated {}",
                    est[j], s.hbar, u[j]
                )));
            }
        }
    }
    for (j, w) in u.iter().enumerate() {
        if !(w.is_finite() && *w > 0.0) {
            return Err(Error::numerical(format!("frequency {j} extrapolates to {w}")));
        }
    }
    Ok(FrequencyEstimate { u, per_sample })
}
