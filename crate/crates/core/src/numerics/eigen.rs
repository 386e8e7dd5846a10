use ndarray::{Array1, Array2, ArrayView2};

use super::{frobenius, sign_normalize};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Full spectrum of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Sorted in descending order.
    pub values: Array1<f64>,
    /// Column j is the unit eigenvector for `values[j]`.
    pub vectors: Array2<f64>,
}

impl EigenResult {
    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Eigenvalues come out in descending order. Each eigenvector is flipped so
/// that its largest-magnitude entry is positive (lowest index on ties).
pub fn sym_eigen(a: ArrayView2<'_, f64>) -> Result<EigenResult> {
    let q = a.nrows();
    if a.ncols() != q {
        return Err(Error::Domain(format!("matrix is {}x{}, not square", q, a.ncols())));
    }
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if !scale.is_finite() {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    let mut asym = 0.0_f64;
    for i in 0..q {
        for j in (i + 1)..q {
            asym = asym.max((a[[i, j]] - a[[j, i]]).abs());
        }
    }
    if asym > 1e-10 * scale {
        return Err(Error::Domain(format!(
            "matrix is not symmetric (max asymmetry {asym:.3e}, scale {scale:.3e})"
        )));
    }

    let mut m = a.to_owned();
    super::symmetrize(&mut m);
    let mut v = Array2::<f64>::eye(q);
    let tiny = f64::MIN_POSITIVE / f64::EPSILON;
    let floor = tiny.max(f64::EPSILON * 1e-3 * frobenius(m.view()));

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..q {
            for r in (p + 1)..q {
                let apr = m[[p, r]];
                let threshold = f64::EPSILON * (m[[p, p]] * m[[r, r]]).abs().sqrt();
                if apr.abs() <= threshold.max(floor) {
                    continue;
                }
                rotated = true;
                rotate(&mut m, &mut v, p, r);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&i, &j| m[[j, j]].total_cmp(&m[[i, i]]));
    let values = Array1::from_iter(order.iter().map(|&i| m[[i, i]]));
    let mut vectors = Array2::zeros((q, q));
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src).to_owned();
        sign_normalize(&mut col);
        vectors.column_mut(dst).assign(&col);
    }
    Ok(EigenResult { values, vectors })
}

/// Annihilates m[p][r] with a plane rotation and accumulates it into `v`.
fn rotate(m: &mut Array2<f64>, v: &mut Array2<f64>, p: usize, r: usize) {
    let q = m.nrows();
    let apr = m[[p, r]];
    let theta = (m[[r, r]] - m[[p, p]]) / (2.0 * apr);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta.is_infinite() { 0.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    m[[p, p]] -= t * apr;
    m[[r, r]] += t * apr;
    m[[p, r]] = 0.0;
    m[[r, p]] = 0.0;
    for k in 0..q {
        if k == p || k == r {
            continue;
        }
        let mkp = m[[k, p]];
        let mkr = m[[k, r]];
        let new_p = c * mkp - s * mkr;
        let new_r = s * mkp + c * mkr;
        m[[k, p]] = new_p;
        m[[p, k]] = new_p;
        m[[k, r]] = new_r;
        m[[r, k]] = new_r;
    }
    for k in 0..q {
        let vkp = v[[k, p]];
        let vkr = v[[k, r]];
        v[[k, p]] = c * vkp - s * vkr;
        v[[k, r]] = s * vkp + c * vkr;
    }
}
