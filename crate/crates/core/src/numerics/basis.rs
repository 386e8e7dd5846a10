use ndarray::{Array1, Array2, ArrayView2};

use super::{norm, sym_eigen, symmetrize};
use crate::{Error, Result};

/// Default relative cut-off below which eigenvalues are treated as zero.
pub const PINV_TOL_RATIO: f64 = 1e-10;

/// Moore–Penrose inverse of a symmetric positive-semidefinite matrix.
///
/// Eigenvalues above `tol_ratio·λ_max` are inverted, the rest are zeroed.
pub fn pseudo_inverse(a: ArrayView2<'_, f64>, tol_ratio: f64) -> Result<Array2<f64>> {
    let eig = sym_eigen(a)?;
    let q = eig.dim();
    let scale = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if let Some(neg) = eig.values.iter().find(|v| **v < -1e-10 * scale) {
        return Err(Error::Domain(format!("matrix is not positive semidefinite (eigenvalue {neg:.3e})")));
    }
    let mut out = Array2::zeros((q, q));
    let lambda_max = eig.values.first().copied().unwrap_or(0.0);
    if lambda_max <= 0.0 {
        return Ok(out);
    }
    let cut = tol_ratio * lambda_max;
    for (j, &lambda) in eig.values.iter().enumerate() {
        if lambda <= cut {
            continue;
        }
        let v = eig.vectors.column(j);
        for r in 0..q {
            for c in 0..q {
                out[[r, c]] += v[r] * v[c] / lambda;
            }
        }
    }
    symmetrize(&mut out);
    Ok(out)
}

/// Orthonormal basis of the orthogonal complement of `axes` in R^p.
///
/// Canonical basis vectors are swept in index order through two passes of
/// modified Gram–Schmidt against the axes and the columns accepted so far;
/// a candidate whose projected norm drops below 1e-8 is skipped. Returns a
/// p×(p−k) matrix.
pub fn complete_basis(axes: &[Array1<f64>], p: usize) -> Result<Array2<f64>> {
    let k = axes.len();
    if k >= p {
        return Err(Error::Domain(format!("cannot complete {k} axes in dimension {p}")));
    }
    for (i, a) in axes.iter().enumerate() {
        if a.len() != p {
            return Err(Error::Domain(format!("axis {i} has length {}, expected {p}", a.len())));
        }
        for (j, b) in axes.iter().enumerate().take(i + 1) {
            let target = if i == j { 1.0 } else { 0.0 };
            if (a.dot(b) - target).abs() > 1e-10 {
                return Err(Error::Domain(format!("axes {j} and {i} are not orthonormal")));
            }
        }
    }
    Ok(complete_unchecked(axes, p))
}

/// [`complete_basis`] without input validation; also allows k = p, which
/// yields a p×0 matrix.
pub(crate) fn complete_unchecked(axes: &[Array1<f64>], p: usize) -> Array2<f64> {
    let want = p.saturating_sub(axes.len());
    let mut accepted: Vec<Array1<f64>> = Vec::with_capacity(want);
    for i in 0..p {
        if accepted.len() == want {
            break;
        }
        let mut v = Array1::zeros(p);
        v[i] = 1.0;
        for _ in 0..2 {
            for u in axes.iter().chain(accepted.iter()) {
                let c = u.dot(&v);
                v.scaled_add(-c, u);
            }
        }
        let len = norm(v.view());
        if len < 1e-8 {
            continue;
        }
        v /= len;
        accepted.push(v);
    }
    let mut out = Array2::zeros((p, accepted.len()));
    for (j, col) in accepted.iter().enumerate() {
        out.column_mut(j).assign(col);
    }
    out
}
