//! Numerical kernels used by the fitting loop.
//!
//! Everything here is a pure function of its inputs. The eigensolver is a
//! cyclic Jacobi method, chosen for its accuracy on the small dense p×p
//! matrices this crate works with and for its fixed, reproducible
//! rotation order.

mod basis;
mod eigen;
mod kernel;
mod lsq;
mod spline;

pub use basis::{complete_basis, pseudo_inverse, PINV_TOL_RATIO};
pub use eigen::{sym_eigen, EigenResult};
pub use kernel::{kernel_eval, KernelKind, KernelSpec};
pub use lsq::{least_squares, LeastSquares};
pub use spline::{spline_design, SplineBasis};

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

/// Empirical second-moment matrix (1/n)·Σ_i R_i R_iᵗ.
pub fn covariance(rows: ArrayView2<'_, f64>) -> Array2<f64> {
    let n = rows.nrows().max(1) as f64;
    let mut v = rows.t().dot(&rows) / n;
    symmetrize(&mut v);
    v
}

pub(crate) fn symmetrize(m: &mut Array2<f64>) {
    let q = m.nrows();
    for i in 0..q {
        for j in (i + 1)..q {
            let avg = 0.5 * (m[[i, j]] + m[[j, i]]);
            m[[i, j]] = avg;
            m[[j, i]] = avg;
        }
    }
}

pub(crate) fn frobenius(m: ArrayView2<'_, f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn norm(v: ArrayView1<'_, f64>) -> f64 {
    v.dot(&v).sqrt()
}

/// Flips `v` so that its entry of largest magnitude is positive; the lowest
/// index wins among equal magnitudes.
pub fn sign_normalize(v: &mut Array1<f64>) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.len() > 0 && v[best] < 0.0 {
        v.mapv_inplace(|x| -x);
    }
}
