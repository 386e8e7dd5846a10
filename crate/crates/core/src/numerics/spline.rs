use ndarray::{Array1, Array2, ArrayView1};

use crate::{Error, Result};

const DEGREE: usize = 3;

/// Clamped cubic B-spline basis on [t_min, t_max] with `knot_count`
/// uniformly spaced interior knots; it has `knot_count + 4` functions.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineBasis {
    knot_count: usize,
    t_min: f64,
    t_max: f64,
    knots: Vec<f64>,
}

impl SplineBasis {
    pub fn new(knot_count: usize, t_min: f64, t_max: f64) -> Result<Self> {
        if !(t_min.is_finite() && t_max.is_finite() && t_min < t_max) {
            return Err(Error::Domain(format!("invalid spline range [{t_min}, {t_max}]")));
        }
        let mut knots = vec![t_min; DEGREE + 1];
        let width = t_max - t_min;
        knots.extend((1..=knot_count).map(|i| t_min + width * i as f64 / (knot_count + 1) as f64));
        knots.extend(std::iter::repeat_n(t_max, DEGREE + 1));
        Ok(Self {
            knot_count,
            t_min,
            t_max,
            knots,
        })
    }

    pub fn knot_count(&self) -> usize {
        self.knot_count
    }

    /// L = N + 4
    pub fn size(&self) -> usize {
        self.knot_count + DEGREE + 1
    }

    pub fn degree(&self) -> usize {
        DEGREE
    }

    pub fn range(&self) -> (f64, f64) {
        (self.t_min, self.t_max)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Index of the knot span holding `t` (already clamped).
    fn span(&self, t: f64) -> usize {
        let last = self.size() - 1;
        if t >= self.knots[last + 1] {
            return last;
        }
        // first index in DEGREE..=last whose next knot exceeds t
        let (mut lo, mut hi) = (DEGREE, last + 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if t < self.knots[mid] {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    /// Writes b_1(t)..b_L(t) into `out`. Arguments outside the range are
    /// clamped to it.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.size());
        let t = t.clamp(self.t_min, self.t_max);
        let span = self.span(t);
        let u = &self.knots;
        let mut vals = [0.0; DEGREE + 1];
        let mut left = [0.0; DEGREE + 1];
        let mut right = [0.0; DEGREE + 1];
        vals[0] = 1.0;
        for j in 1..=DEGREE {
            left[j] = t - u[span + 1 - j];
            right[j] = u[span + j] - t;
            let mut saved = 0.0;
            for r in 0..j {
                let temp = vals[r] / (right[r + 1] + left[j - r]);
                vals[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            vals[j] = saved;
        }
        out.iter_mut().for_each(|v| *v = 0.0);
        out[span - DEGREE..=span].copy_from_slice(&vals);
    }

    pub fn eval(&self, t: f64) -> Array1<f64> {
        let mut out = Array1::zeros(self.size());
        self.eval_into(t, out.as_slice_mut().expect("contiguous"));
        out
    }
}

/// Design matrix with entry (i, ℓ) = b_ℓ(t_i).
pub fn spline_design(basis: &SplineBasis, t: ArrayView1<'_, f64>) -> Array2<f64> {
    let mut out = Array2::zeros((t.len(), basis.size()));
    for (mut row, &ti) in out.rows_mut().into_iter().zip(t.iter()) {
        basis.eval_into(ti, row.as_slice_mut().expect("row-major"));
    }
    out
}
