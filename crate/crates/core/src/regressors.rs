//! Estimators of the regression functions s^k of step [R].
//!
//! Every regressor maps a principal value t to a p-vector. The component
//! along its own axis is t and the components along earlier axes are zero
//! by construction; only the p − k coordinates in the completed orthogonal
//! basis are estimated (kernel and spline kinds) or derived from the
//! residual covariance (linear kind).

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::numerics::{complete_basis, covariance, spline_design, KernelSpec, LeastSquares, SplineBasis};
use crate::par::map_range;
use crate::{Error, Result};

/// Default number of interior knots for spline regressors.
pub const DEFAULT_KNOTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum BandwidthRule {
    Fixed { h: f64 },
    /// h = 1.06·σ̂(Y)·n^(−1/5)
    Silverman,
}

impl BandwidthRule {
    pub fn bandwidth(&self, y: ArrayView1<'_, f64>) -> Result<f64> {
        match *self {
            BandwidthRule::Fixed { h } => Ok(h),
            BandwidthRule::Silverman => {
                let n = y.len() as f64;
                let sd = y.std(1.0);
                if !(sd > 0.0) {
                    return Err(Error::DegenerateProjection);
                }
                Ok(1.06 * sd * n.powf(-0.2))
            }
        }
    }
}

/// Which estimator to use in step [R], with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegressorSpec {
    Linear,
    Kernel { bandwidth: BandwidthRule },
    Spline { knots: usize, ridge: f64 },
}

impl RegressorSpec {
    pub fn linear() -> Self {
        RegressorSpec::Linear
    }

    pub fn kernel(h: f64) -> Self {
        RegressorSpec::Kernel {
            bandwidth: BandwidthRule::Fixed { h },
        }
    }

    pub fn kernel_silverman() -> Self {
        RegressorSpec::Kernel {
            bandwidth: BandwidthRule::Silverman,
        }
    }

    pub fn spline(knots: usize) -> Self {
        RegressorSpec::Spline { knots, ridge: 0.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RegressorSpec::Linear => "linear",
            RegressorSpec::Kernel { .. } => "kernel",
            RegressorSpec::Spline { .. } => "spline",
        }
    }

    /// Checks the hyperparameters against a sample of size n.
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            RegressorSpec::Linear => Ok(()),
            RegressorSpec::Kernel { bandwidth } => {
                if let BandwidthRule::Fixed { h } = bandwidth {
                    KernelSpec::gaussian(h)?;
                }
                if n < 2 {
                    return Err(Error::Spec("kernel regression needs at least 2 samples".into()));
                }
                Ok(())
            }
            RegressorSpec::Spline { knots, ridge } => {
                if knots + 4 > n {
                    return Err(Error::Spec(format!(
                        "spline with {knots} knots needs at least {} samples, got {n}",
                        knots + 4
                    )));
                }
                if !(ridge >= 0.0 && ridge.is_finite()) {
                    return Err(Error::Spec(format!("ridge must be non-negative, got {ridge}")));
                }
                Ok(())
            }
        }
    }
}

/// A fitted s^k.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedRegressor {
    axis: Array1<f64>,
    model: RegressorModel,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RegressorModel {
    /// s(t) = t·b
    Linear { b: Array1<f64> },
    /// Nadaraya–Watson average of the training coordinates.
    Kernel {
        kernel: KernelSpec,
        /// Training principal values Y_i.
        y: Array1<f64>,
        /// Training residuals in the complement basis, n×m.
        coords: Array2<f64>,
        /// p×m orthonormal complement of the axes up to this one.
        complement: Array2<f64>,
    },
    /// Least-squares cubic B-spline per complement coordinate.
    Spline {
        basis: SplineBasis,
        /// L×m, column j holds the coefficients of coordinate j.
        coefficients: Array2<f64>,
        complement: Array2<f64>,
    },
}

impl FittedRegressor {
    pub(crate) fn from_parts(axis: Array1<f64>, model: RegressorModel) -> Self {
        Self { axis, model }
    }

    pub fn axis(&self) -> ArrayView1<'_, f64> {
        self.axis.view()
    }

    pub fn model(&self) -> &RegressorModel {
        &self.model
    }

    pub fn kind(&self) -> &'static str {
        match self.model {
            RegressorModel::Linear { .. } => "linear",
            RegressorModel::Kernel { .. } => "kernel",
            RegressorModel::Spline { .. } => "spline",
        }
    }

    pub fn p(&self) -> usize {
        self.axis.len()
    }

    /// s(t) in ambient coordinates.
    pub fn evaluate(&self, t: f64) -> Array1<f64> {
        match &self.model {
            RegressorModel::Linear { b } => b * t,
            RegressorModel::Kernel {
                kernel, y, coords, complement,
            } => {
                let est = kernel_estimate(kernel, y.view(), coords.view(), t);
                &self.axis * t + complement.dot(&est)
            }
            RegressorModel::Spline {
                basis,
                coefficients,
                complement,
            } => {
                let est = coefficients.t().dot(&basis.eval(t));
                &self.axis * t + complement.dot(&est)
            }
        }
    }

    /// Row i holds s(y_i).
    pub fn evaluate_many(&self, y: ArrayView1<'_, f64>) -> Array2<f64> {
        let rows = map_range(y.len(), |i| self.evaluate(y[i]));
        let mut out = Array2::zeros((y.len(), self.p()));
        for (mut dst, src) in out.rows_mut().into_iter().zip(rows) {
            dst.assign(&src);
        }
        out
    }
}

/// Nadaraya–Watson weights at t. Falls back to the nearest training value
/// (smallest index on ties) when every kernel weight underflows.
pub fn kernel_weights(kernel: &KernelSpec, y: ArrayView1<'_, f64>, t: f64) -> Array1<f64> {
    let raw = y.mapv(|yi| kernel.weight(t, yi));
    let total: f64 = raw.sum();
    if total >= f64::MIN_POSITIVE && total.is_finite() {
        return raw / total;
    }
    let mut nearest = 0;
    for (i, yi) in y.iter().enumerate() {
        if (t - yi).abs() < (t - y[nearest]).abs() {
            nearest = i;
        }
    }
    let mut w = Array1::zeros(y.len());
    w[nearest] = 1.0;
    w
}

fn kernel_estimate(kernel: &KernelSpec, y: ArrayView1<'_, f64>, coords: ArrayView2<'_, f64>, t: f64) -> Array1<f64> {
    let w = kernel_weights(kernel, y, t);
    coords.t().dot(&w)
}

fn complement_of(earlier: &[Array1<f64>], a: &Array1<f64>) -> Result<Array2<f64>> {
    let p = a.len();
    let mut axes = earlier.to_vec();
    axes.push(a.clone());
    if axes.len() == p {
        return Ok(Array2::zeros((p, 0)));
    }
    complete_basis(&axes, p)
}

fn check_axis(residuals: ArrayView2<'_, f64>, a: &Array1<f64>) -> Result<()> {
    if a.len() != residuals.ncols() {
        return Err(Error::Shape {
            expected: residuals.ncols(),
            got: a.len(),
        });
    }
    Ok(())
}

fn principal_values(residuals: ArrayView2<'_, f64>, a: &Array1<f64>) -> Result<Array1<f64>> {
    let y = residuals.dot(a);
    let first = y[0];
    if y.iter().all(|v| *v == first) {
        return Err(Error::DegenerateProjection);
    }
    Ok(y)
}

/// b = V·a / (aᵗ·V·a) with V the residual second-moment matrix.
pub fn fit_linear(residuals: ArrayView2<'_, f64>, a: &Array1<f64>) -> Result<FittedRegressor> {
    check_axis(residuals, a)?;
    let v = covariance(residuals);
    let va = v.dot(a);
    let projected = a.dot(&va);
    let trace = v.diag().sum();
    if !(projected > 1e-14 * trace) {
        return Err(Error::ZeroProjectedVariance);
    }
    Ok(FittedRegressor::from_parts(a.clone(), RegressorModel::Linear { b: va / projected }))
}

pub fn fit_kernel(
    residuals: ArrayView2<'_, f64>,
    a: &Array1<f64>,
    earlier: &[Array1<f64>],
    bandwidth: BandwidthRule,
) -> Result<FittedRegressor> {
    check_axis(residuals, a)?;
    if residuals.nrows() < 2 {
        return Err(Error::Spec("kernel regression needs at least 2 samples".into()));
    }
    let y = principal_values(residuals, a)?;
    let kernel = KernelSpec::gaussian(bandwidth.bandwidth(y.view())?)?;
    let complement = complement_of(earlier, a)?;
    let coords = residuals.dot(&complement);
    Ok(FittedRegressor::from_parts(
        a.clone(),
        RegressorModel::Kernel {
            kernel,
            y,
            coords,
            complement,
        },
    ))
}

pub fn fit_spline(
    residuals: ArrayView2<'_, f64>,
    a: &Array1<f64>,
    earlier: &[Array1<f64>],
    knots: usize,
    ridge: f64,
) -> Result<FittedRegressor> {
    check_axis(residuals, a)?;
    RegressorSpec::Spline { knots, ridge }.validate(residuals.nrows())?;
    let y = principal_values(residuals, a)?;
    let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    let basis = SplineBasis::new(knots, lo, hi)?;
    let design = spline_design(&basis, y.view());
    let solver = LeastSquares::new(design.view(), ridge)?;
    let complement = complement_of(earlier, a)?;
    let coords = residuals.dot(&complement);
    let columns = map_range(coords.ncols(), |j| solver.solve(coords.column(j)));
    let mut coefficients = Array2::zeros((basis.size(), coords.ncols()));
    for (j, col) in columns.into_iter().enumerate() {
        coefficients.column_mut(j).assign(&col?);
    }
    Ok(FittedRegressor::from_parts(
        a.clone(),
        RegressorModel::Spline {
            basis,
            coefficients,
            complement,
        },
    ))
}

/// Dispatches on `spec`.
pub fn fit_regressor(
    residuals: ArrayView2<'_, f64>,
    a: &Array1<f64>,
    earlier: &[Array1<f64>],
    spec: &RegressorSpec,
) -> Result<FittedRegressor> {
    match *spec {
        RegressorSpec::Linear => fit_linear(residuals, a),
        RegressorSpec::Kernel { bandwidth } => fit_kernel(residuals, a, earlier, bandwidth),
        RegressorSpec::Spline { knots, ridge } => fit_spline(residuals, a, earlier, knots, ridge),
    }
}

/// Column means of a matrix, used for the centring diagnostics.
pub(crate) fn column_means(m: ArrayView2<'_, f64>) -> Array1<f64> {
    m.mean_axis(Axis(0)).unwrap_or_else(|| Array1::zeros(m.ncols()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn linear_isotropic() {
        // V = I for the four points ±√2·e1, ±√2·e2
        let s = 2f64.sqrt();
        let r = array![[s, 0.0], [-s, 0.0], [0.0, s], [0.0, -s]];
        let a = array![0.6, 0.8];
        let reg = fit_linear(r.view(), &a).unwrap();
        let RegressorModel::Linear { b } = reg.model() else { unreachable!() };
        assert!((b - &a).iter().all(|d| d.abs() < 1e-15));
        assert!((reg.evaluate(2.0) - &a * 2.0).iter().all(|d| d.abs() < 1e-15));
    }

    #[test]
    fn linear_zero_projection() {
        let r = array![[1.0, 0.0], [-1.0, 0.0]];
        assert!(matches!(fit_linear(r.view(), &array![0.0, 1.0]), Err(Error::ZeroProjectedVariance)));
    }

    #[test]
    fn kernel_two_point_midpoint() {
        let r = array![[-1.0, 3.0], [1.0, 5.0]];
        let a = array![1.0, 0.0];
        let reg = fit_kernel(r.view(), &a, &[], BandwidthRule::Fixed { h: 0.7 }).unwrap();
        let s = reg.evaluate(0.0);
        assert!((s[0]).abs() < 1e-15);
        assert!((s[1] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn kernel_localises_as_h_shrinks() {
        let r = array![[-1.0, 3.0], [0.5, -2.0], [1.0, 5.0]];
        let a = array![1.0, 0.0];
        let reg = fit_kernel(r.view(), &a, &[], BandwidthRule::Fixed { h: 1e-3 }).unwrap();
        assert!((reg.evaluate(0.5)[1] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_underflow_falls_back_to_nearest() {
        let r = array![[-1.0, 3.0], [1.0, 5.0]];
        let a = array![1.0, 0.0];
        let reg = fit_kernel(r.view(), &a, &[], BandwidthRule::Fixed { h: 1e-3 }).unwrap();
        assert_eq!(reg.evaluate(50.0)[1], 5.0);
        assert_eq!(reg.evaluate(-50.0)[1], 3.0);
        // exactly between: the smaller index wins
        let far = fit_kernel(r.view(), &a, &[], BandwidthRule::Fixed { h: 1e-6 }).unwrap();
        assert_eq!(far.evaluate(0.0)[1], 3.0);
    }

    #[test]
    fn kernel_degenerate_projection() {
        let r = array![[1.0, 3.0], [1.0, 5.0]];
        assert!(matches!(
            fit_kernel(r.view(), &array![1.0, 0.0], &[], BandwidthRule::Silverman),
            Err(Error::DegenerateProjection)
        ));
    }

    #[test]
    fn silverman_rule() {
        let y = array![1.0, 2.0, 3.0, 4.0];
        let sd = (5.0f64 / 3.0).sqrt();
        let h = BandwidthRule::Silverman.bandwidth(y.view()).unwrap();
        assert!((h - 1.06 * sd * 4f64.powf(-0.2)).abs() < 1e-15);
    }

    #[test]
    fn spline_needs_enough_samples() {
        let r = Array2::from_shape_fn((7, 2), |(i, j)| (i * (j + 1)) as f64);
        let err = fit_spline(r.view(), &array![1.0, 0.0], &[], 4, 0.0).unwrap_err();
        assert!(matches!(err, Error::Spec(_)));
        assert!(fit_spline(r.view(), &array![1.0, 0.0], &[], 3, 0.0).is_ok());
    }

    #[test]
    fn spline_constant_coordinate() {
        let r = Array2::from_shape_fn((20, 2), |(i, j)| if j == 0 { i as f64 / 3.0 } else { 2.5 });
        let reg = fit_spline(r.view(), &array![1.0, 0.0], &[], 4, 0.0).unwrap();
        for t in [-1.0, 0.0, 1.7, 3.3, 6.33, 9.0] {
            let s = reg.evaluate(t);
            assert_eq!(s[0], t);
            assert!((s[1] - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn full_dimension_has_empty_complement() {
        let r = array![[1.0, 0.5], [-1.0, 0.2], [0.3, -0.7]];
        let a = array![0.0, 1.0];
        let reg = fit_kernel(r.view(), &a, &[array![1.0, 0.0]], BandwidthRule::Fixed { h: 1.0 }).unwrap();
        assert_eq!(reg.evaluate(0.4), array![0.0, 0.4]);
    }
}
