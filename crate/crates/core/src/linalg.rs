//! Small dense least-squares helper shared by the fitting stages.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Default cap on the condition number of a scaled design matrix.
pub const COND_CAP: f64 = 1e10;

#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub x: DVector<f64>,
    /// Euclidean norm of `A x − b`.
    pub residual: f64,
    /// Condition number of the column-scaled matrix.
    pub cond: f64,
    pub rank: usize,
}

/// Solves `min |A x − b|` after scaling every column of `A` to unit norm.
///
/// Fails when the scaled matrix is rank deficient or its condition number
/// exceeds `cond_cap`; `what` names the solve in the error message.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>, cond_cap: f64, what: &str) -> Result<LeastSquares> {
    let (rows, cols) = a.shape();
    if rows != b.len() {
        return Err(Error::numerical(format!("{what}: {rows} rows but {} right-hand sides", b.len())));
    }
    if cols == 0 {
        return Ok(LeastSquares {
            x: DVector::zeros(0),
            residual: b.norm(),
            cond: 1.0,
            rank: 0,
        });
    }
    if rows < cols {
        return Err(Error::numerical(format!(
            "{what}: underdetermined ({rows} equations for {cols} unknowns)"
        )));
    }
    let scales: Vec<f64> = (0..cols)
        .map(|j| {
            let s = a.column(j).norm();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    let mut scaled = a.clone();
    for (j, s) in scales.iter().enumerate() {
        scaled.column_mut(j).unscale_mut(*s);
    }
    let svd = scaled.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let tol = smax * (rows.max(cols) as f64) * f64::EPSILON;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if rank < cols || cond > cond_cap {
        return Err(Error::numerical(format!(
            "{what}: design matrix is ill-conditioned (rank {rank} of {cols}, cond {cond:.3e})"
        )));
    }
    let y = svd
        .solve(b, tol)
        .map_err(|e| Error::numerical(format!("{what}: {e}")))?;
    let x = DVector::from_iterator(cols, y.iter().zip(&scales).map(|(v, s)| v / s));
    let residual = (a * &x - b).norm();
    Ok(LeastSquares { x, residual, cond, rank })
}

/// Minimum-norm solution of `min |A x − b|` with singular values of the
/// column-scaled matrix below `rel_tol · σ_max` treated as zero. `cond` is
/// taken over the retained part.
pub fn min_norm_least_squares(a: &DMatrix<f64>, b: &DVector<f64>, rel_tol: f64, what: &str) -> Result<LeastSquares> {
    let (rows, cols) = a.shape();
    if rows != b.len() {
        return Err(Error::numerical(format!("{what}: {rows} rows but {} right-hand sides", b.len())));
    }
    if cols == 0 || rows == 0 {
        return Ok(LeastSquares { x: DVector::zeros(cols), residual: b.norm(), cond: 1.0, rank: 0 });
    }
    let mut scaled = a.clone();
    let mut scales = vec![1.0; cols];
    for (j, s) in scales.iter_mut().enumerate() {
        let norm = scaled.column(j).norm();
        if norm > 0.0 {
            *s = norm;
            scaled.column_mut(j).unscale_mut(norm);
        }
    }
    let svd = scaled.svd(true, true);
    let smax = svd.singular_values.max();
    let tol = smax * rel_tol;
    let kept: Vec<f64> = svd.singular_values.iter().copied().filter(|&s| s > tol).collect();
    let rank = kept.len();
    let cond = if rank > 0 { smax / kept.iter().copied().fold(f64::INFINITY, f64::min) } else { 1.0 };
    let y = svd
        .solve(b, tol)
        .map_err(|e| Error::numerical(format!("{what}: {e}")))?;
    let x = DVector::from_iterator(cols, y.iter().zip(&scales).map(|(v, s)| v / s));
    let residual = (a * &x - b).norm();
    Ok(LeastSquares { x, residual, cond, rank })
}

/// Flags the columns of `A` whose coefficient is determined by `A x`, i.e. whose
/// unit vector lies in the row space. Scaled eigenvalues of `AᵀA` below
/// `rel_tol` (relative to the largest) span the null space.
pub fn identifiable_columns(a: &DMatrix<f64>, rel_tol: f64) -> Vec<bool> {
    let cols = a.ncols();
    if cols == 0 {
        return Vec::new();
    }
    let mut scaled = a.clone();
    for j in 0..cols {
        let s = scaled.column(j).norm();
        if s > 0.0 {
            scaled.column_mut(j).unscale_mut(s);
        }
    }
    let gram = scaled.transpose() * &scaled;
    let eig = gram.symmetric_eigen();
    let top = eig.eigenvalues.max().max(0.0);
    (0..cols)
        .map(|j| {
            let leak: f64 = (0..cols)
                .filter(|&k| eig.eigenvalues[k] <= rel_tol * top)
                .map(|k| eig.eigenvectors[(j, k)].powi(2))
                .sum();
            leak < 1e-8
        })
        .collect()
}
