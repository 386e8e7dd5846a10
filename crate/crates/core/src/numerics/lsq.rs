use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2};

use crate::{Error, Result};

/// Diagonal entries of R below this fraction of the largest one mark the
/// design as numerically rank deficient.
const RANK_TOL: f64 = 1e-12;

/// Householder QR factorisation of a (possibly ridge-augmented) design
/// matrix, reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    /// Upper triangle holds R; Householder vectors are kept separately.
    r: Array2<f64>,
    reflectors: Vec<Array1<f64>>,
    rows: usize,
}

impl LeastSquares {
    /// Factorises B (m×L, m ≥ L), augmented with √ridge·I when ridge > 0.
    pub fn new(design: ArrayView2<'_, f64>, ridge: f64) -> Result<Self> {
        let (m, l) = design.dim();
        if !(ridge >= 0.0 && ridge.is_finite()) {
            return Err(Error::Spec(format!("ridge must be a non-negative number, got {ridge}")));
        }
        if m < l && ridge == 0.0 {
            return Err(Error::Spec(format!("{m} rows cannot determine {l} coefficients")));
        }
        let total = if ridge > 0.0 { m + l } else { m };
        let mut a = Array2::zeros((total, l));
        a.slice_mut(s![..m, ..]).assign(&design);
        if ridge > 0.0 {
            let root = ridge.sqrt();
            for j in 0..l {
                a[[m + j, j]] = root;
            }
        }

        let mut reflectors = Vec::with_capacity(l);
        for j in 0..l {
            let x = a.slice(s![j.., j]);
            let len = x.dot(&x).sqrt();
            let mut v = x.to_owned();
            if len == 0.0 {
                reflectors.push(Array1::zeros(total - j));
                continue;
            }
            let alpha = if x[0] > 0.0 { -len } else { len };
            v[0] -= alpha;
            let vlen = v.dot(&v).sqrt();
            v /= vlen;
            let mut block = a.slice_mut(s![j.., j..]);
            let proj = v.dot(&block);
            for (mut col, c) in block.columns_mut().into_iter().zip(proj.iter()) {
                col.scaled_add(-2.0 * c, &v);
            }
            reflectors.push(v);
        }

        let diag: Vec<f64> = (0..l).map(|j| a[[j, j]].abs()).collect();
        let max = diag.iter().fold(0.0_f64, |m, v| m.max(*v));
        let min = diag.iter().fold(f64::INFINITY, |m, v| m.min(*v));
        if l > 0 && (max == 0.0 || min <= RANK_TOL * max) {
            let ratio = if min == 0.0 { f64::INFINITY } else { max / min };
            return Err(Error::SingularDesign { condition: ratio * ratio });
        }
        Ok(Self {
            r: a.slice(s![..l, ..]).to_owned(),
            reflectors,
            rows: m,
        })
    }

    pub fn size(&self) -> usize {
        self.r.ncols()
    }

    /// Minimiser of ‖Bα − y‖² + ridge·‖α‖².
    pub fn solve(&self, y: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        if y.len() != self.rows {
            return Err(Error::Shape {
                expected: self.rows,
                got: y.len(),
            });
        }
        let l = self.size();
        let total = self.reflectors.first().map_or(self.rows, Array1::len);
        let mut z = Array1::zeros(total);
        z.slice_mut(s![..self.rows]).assign(&y);
        for (j, v) in self.reflectors.iter().enumerate() {
            let mut tail = z.slice_mut(s![j..]);
            let c = v.dot(&tail);
            tail.scaled_add(-2.0 * c, v);
        }
        let mut alpha = Array1::zeros(l);
        for i in (0..l).rev() {
            let mut acc = z[i];
            for k in (i + 1)..l {
                acc -= self.r[[i, k]] * alpha[k];
            }
            alpha[i] = acc / self.r[[i, i]];
        }
        Ok(alpha)
    }
}

/// Solves min ‖Bα − y‖² + ridge·‖α‖² through a QR factorisation.
pub fn least_squares(design: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>, ridge: f64) -> Result<Array1<f64>> {
    LeastSquares::new(design, ridge)?.solve(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn identity_design() {
        let y = array![3.0, -1.5, 2.25];
        let a = least_squares(Array2::<f64>::eye(3).view(), y.view(), 0.0).unwrap();
        for (x, z) in a.iter().zip(y.iter()) {
            assert!((x - z).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_fit_in_column_space() {
        let b = array![[1.0, 0.0], [1.0, 1.0], [1.0, 2.0], [1.0, 3.0]];
        let y = array![1.0, 3.0, 5.0, 7.0];
        let a = least_squares(b.view(), y.view(), 0.0).unwrap();
        let resid = &b.dot(&a) - &y;
        assert!(resid.iter().all(|r| r.abs() < 1e-10));
    }

    #[test]
    fn rank_deficient_without_ridge() {
        let b = array![[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]];
        let y = array![1.0, 2.0, 3.0];
        match least_squares(b.view(), y.view(), 0.0) {
            Err(Error::SingularDesign { condition }) => assert!(condition > 1e20),
            other => panic!("unexpected {other:?}"),
        }
        // ridge regularises the same system
        let a = least_squares(b.view(), y.view(), 1e-3).unwrap();
        let grad = b.t().dot(&(&b.dot(&a) - &y)) + &a * 1e-3;
        assert!(grad.iter().all(|g| g.abs() < 1e-10));
    }

    #[test]
    fn shape_checks() {
        let b = array![[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let f = LeastSquares::new(b.view(), 0.0).unwrap();
        assert!(matches!(f.solve(array![1.0].view()), Err(Error::Shape { .. })));
        assert!(LeastSquares::new(array![[1.0, 2.0]].view(), 0.0).is_err());
        assert!(LeastSquares::new(b.view(), -1.0).is_err());
    }
}
