//! The fitting loop and the fitted auto-associative model.
//!
//! Each iteration k runs four steps on the residuals R^{k−1}:
//!
//! * **[A]** choose a unit axis a^k orthogonal to a^1..a^{k−1} that
//!   maximises the projection index;
//! * **[P]** project: Y^k_i = ⟨a^k, R^{k−1}_i⟩;
//! * **[R]** estimate the regression function s^k from (Y^k, R^{k−1});
//! * **[U]** update: R^k_i = R^{k−1}_i − s^k(Y^k_i).
//!
//! The model stores the training mean, the axes and the regressors. Its
//! encoder replays [P]/[U] on new points, its decoder sums the regression
//! functions, and `evaluate_f` is the auto-associative function whose zero
//! set is the fitted manifold.

mod io;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::Serialize;

use crate::data::{center, init_state, mean_sq_norm, DataMatrix};
use crate::error::Step;
use crate::indices::{solve_axis_with, IndexKind};
use crate::par::map_range;
use crate::regressors::{fit_regressor, FittedRegressor, RegressorSpec};
use crate::{Error, Result};

pub use io::{from_json, load, save, to_json, to_json_string, MODEL_VERSION};

/// Residual orthogonality tolerance checked after every [U] step.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

/// Tolerance on ⟨a^j, s^k(t)⟩ − δ_{jk}·t for a model to count as additive.
pub const ADDITIVE_TOL: f64 = 1e-8;

/// Residual variance at or below this fraction of σ²(X) counts as zero and
/// stops the loop early.
pub const ZERO_VARIANCE_RATIO: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub d: usize,
    pub index: IndexKind,
    pub regressor: RegressorSpec,
    /// Stop at the first k with Q_k ≥ threshold.
    pub q_threshold: Option<f64>,
    /// Use m ∨ mᵗ instead of the plain nearest-neighbour relation.
    pub symmetric_contiguity: bool,
    /// Keep a copy of every R^k in the report.
    pub keep_residuals: bool,
}

impl FitConfig {
    pub fn new(d: usize, index: IndexKind, regressor: RegressorSpec) -> Self {
        Self {
            d,
            index,
            regressor,
            q_threshold: None,
            symmetric_contiguity: false,
            keep_residuals: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FitStatus {
    Completed,
    /// Residual variance reached zero after `completed` iterations.
    StoppedEarly { completed: usize },
    /// Q reached the requested threshold after `completed` iterations.
    ReachedThreshold { completed: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct StepReport {
    pub k: usize,
    pub axis: Vec<f64>,
    /// Index value attained at the chosen axis.
    pub index_value: f64,
    /// σ²(R^k)
    pub residual_variance: f64,
    pub q: f64,
    /// ‖mean_i s^k(Y^k_i)‖, zero for linear and spline fits.
    pub fitted_mean_norm: f64,
    /// ‖mean_i R^k_i‖
    pub residual_mean_norm: f64,
    /// Range of the training principal values Y^k.
    pub y_range: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct FitReport {
    pub steps: Vec<StepReport>,
    /// n×k matrix of principal values, one column per completed step.
    pub principal_values: Array2<f64>,
    /// ε = R^d
    pub residuals: Array2<f64>,
    /// R^0..R^d when [`FitConfig::keep_residuals`] is set.
    pub residual_history: Vec<Array2<f64>>,
    /// σ²(X)
    pub total_variance: f64,
    /// Q_0..Q_d for the requested d, padded with 1 after an early stop.
    pub q_curve: Vec<f64>,
    pub status: FitStatus,
    pub warnings: Vec<String>,
}

/// A fitted d-dimensional auto-associative model.
#[derive(Debug, Clone, PartialEq)]
pub struct AutoAssociativeModel {
    mean: Array1<f64>,
    regressors: Vec<FittedRegressor>,
    q_curve: Vec<f64>,
    index: IndexKind,
    symmetric_contiguity: bool,
    regressor_spec: RegressorSpec,
    y_ranges: Vec<[f64; 2]>,
}

/// Runs `d` iterations of the projection pursuit loop.
pub fn fit(
    data: &DataMatrix,
    d: usize,
    index: IndexKind,
    spec: &RegressorSpec,
) -> Result<(AutoAssociativeModel, FitReport)> {
    fit_with(data, &FitConfig::new(d, index, *spec))
}

pub fn fit_with(data: &DataMatrix, config: &FitConfig) -> Result<(AutoAssociativeModel, FitReport)> {
    let (n, p) = (data.n(), data.p());
    let d = config.d;
    if d < 1 || d > p {
        return Err(Error::Spec(format!("target dimension must be in 1..={p}, got {d}")));
    }
    if n < 2 {
        return Err(Error::Spec(format!("fitting needs at least 2 samples, got {n}")));
    }
    if !config.index.is_optimizable() {
        return Err(Error::NotOptimizable(config.index.name()));
    }
    config.regressor.validate(n)?;

    let centered = center(data);
    let total = centered.total_variance;
    if total <= 0.0 {
        return Err(Error::at(Step::Axis, 1)(Error::NothingToFit));
    }

    let mut state = init_state(&centered);
    let mut regressors = Vec::with_capacity(d);
    let mut steps = Vec::with_capacity(d);
    let mut q_curve = vec![0.0];
    let mut history = Vec::new();
    let mut warnings = Vec::new();
    let mut status = FitStatus::Completed;
    if config.keep_residuals {
        history.push(state.residuals().to_owned());
    }

    for k in 1..=d {
        if state.residual_variance() <= ZERO_VARIANCE_RATIO * total {
            status = FitStatus::StoppedEarly { completed: k - 1 };
            break;
        }
        let residuals = state.residuals();

        let axis = solve_axis_with(residuals, config.index, state.axes(), config.symmetric_contiguity)
            .map_err(Error::at(Step::Axis, k))?;
        let index_value = config
            .index
            .evaluate(residuals, axis.view())
            .map_err(Error::at(Step::Axis, k))?;

        let y = residuals.dot(&axis);
        let y_range = y
            .iter()
            .fold([f64::INFINITY, f64::NEG_INFINITY], |[lo, hi], v| [lo.min(*v), hi.max(*v)]);
        if !y_range.iter().all(|v| v.is_finite()) {
            return Err(Error::at(Step::Projection, k)(Error::Domain("non-finite principal values".into())));
        }

        let reg = fit_regressor(residuals, &axis, state.axes(), &config.regressor)
            .map_err(Error::at(Step::Regression, k))?;

        let fitted = reg.evaluate_many(y.view());
        let updated = &residuals - &fitted;
        let fitted_mean_norm = vector_norm(column_mean(fitted.view()).view());
        state.advance(axis.clone(), y, updated);
        if let Some((axis_idx, sample, value)) = state.orthogonality_violation(ORTHOGONALITY_TOL) {
            return Err(Error::at(Step::Update, k)(Error::Orthogonality {
                axis: axis_idx + 1,
                sample,
                value,
            }));
        }

        let residual_variance = state.residual_variance();
        let q = 1.0 - residual_variance / total;
        let previous = *q_curve.last().expect("Q_0 present");
        if q < previous - 1e-10 {
            let msg = format!("information ratio decreased at step {k}: {previous:.6} -> {q:.6}");
            log::warn!("{msg}");
            warnings.push(msg);
        }
        q_curve.push(q);
        if config.keep_residuals {
            history.push(state.residuals().to_owned());
        }
        steps.push(StepReport {
            k,
            axis: axis.to_vec(),
            index_value,
            residual_variance,
            q,
            fitted_mean_norm,
            residual_mean_norm: vector_norm(column_mean(state.residuals()).view()),
            y_range,
        });
        regressors.push(reg);

        if let Some(threshold) = config.q_threshold {
            if q >= threshold && k < d {
                status = FitStatus::ReachedThreshold { completed: k };
                break;
            }
        }
    }

    let mut report_q = q_curve.clone();
    if let FitStatus::StoppedEarly { .. } = status {
        report_q.resize(d + 1, 1.0);
    }
    let model = AutoAssociativeModel {
        mean: centered.mean,
        y_ranges: steps.iter().map(|s| s.y_range).collect(),
        regressors,
        q_curve,
        index: config.index,
        symmetric_contiguity: config.symmetric_contiguity,
        regressor_spec: config.regressor,
    };
    let report = FitReport {
        steps,
        principal_values: state.principal_values(),
        residuals: state.residuals().to_owned(),
        residual_history: history,
        total_variance: total,
        q_curve: report_q,
        status,
        warnings,
    };
    Ok((model, report))
}

fn column_mean(m: ArrayView2<'_, f64>) -> Array1<f64> {
    crate::regressors::column_means(m)
}

fn vector_norm(v: ArrayView1<'_, f64>) -> f64 {
    v.dot(&v).sqrt()
}

/// Largest deviations of ⟨a^j, s^k(t)⟩ from δ_{jk}·t over probe grids.
#[derive(Debug, Clone, Serialize)]
pub struct AdditivityReport {
    /// Entry [j][k]: max over the probes of |⟨a^j, s^k(t)⟩ − δ_{jk}·t|.
    pub deviations: Vec<Vec<f64>>,
    /// Max over j ≤ k; always small for a fitted model.
    pub max_structural: f64,
    /// Max over j > k; zero for additive models.
    pub max_cross: f64,
    pub additive: bool,
}

impl AutoAssociativeModel {
    pub(crate) fn from_parts(
        mean: Array1<f64>,
        regressors: Vec<FittedRegressor>,
        q_curve: Vec<f64>,
        index: IndexKind,
        symmetric_contiguity: bool,
        regressor_spec: RegressorSpec,
        y_ranges: Vec<[f64; 2]>,
    ) -> Self {
        Self {
            mean,
            regressors,
            q_curve,
            index,
            symmetric_contiguity,
            regressor_spec,
            y_ranges,
        }
    }

    pub fn p(&self) -> usize {
        self.mean.len()
    }

    pub fn d(&self) -> usize {
        self.regressors.len()
    }

    pub fn mean(&self) -> ArrayView1<'_, f64> {
        self.mean.view()
    }

    pub fn axes(&self) -> Vec<ArrayView1<'_, f64>> {
        self.regressors.iter().map(FittedRegressor::axis).collect()
    }

    pub fn regressors(&self) -> &[FittedRegressor] {
        &self.regressors
    }

    pub fn index(&self) -> IndexKind {
        self.index
    }

    pub fn symmetric_contiguity(&self) -> bool {
        self.symmetric_contiguity
    }

    pub fn regressor_spec(&self) -> RegressorSpec {
        self.regressor_spec
    }

    /// Ranges of the training principal values, one per axis.
    pub fn y_ranges(&self) -> &[[f64; 2]] {
        &self.y_ranges
    }

    /// Q_0..Q_d
    pub fn q_curve(&self) -> &[f64] {
        &self.q_curve
    }

    /// Q_0..Q_d, the information ratio of the first k steps.
    pub fn information_ratio(&self) -> Vec<f64> {
        self.q_curve.clone()
    }

    fn check_cols(&self, got: usize, expected: usize) -> Result<()> {
        if got != expected {
            return Err(Error::Shape { expected, got });
        }
        Ok(())
    }

    /// Principal values of `x` and its final residual R^d.
    pub fn encode(&self, x: ArrayView1<'_, f64>) -> Result<(Array1<f64>, Array1<f64>)> {
        self.check_cols(x.len(), self.p())?;
        Ok(self.encode_row(x))
    }

    fn encode_row(&self, x: ArrayView1<'_, f64>) -> (Array1<f64>, Array1<f64>) {
        let mut r = &x - &self.mean;
        let mut y = Array1::zeros(self.d());
        for (k, reg) in self.regressors.iter().enumerate() {
            let t = reg.axis().dot(&r);
            y[k] = t;
            r -= &reg.evaluate(t);
        }
        (y, r)
    }

    /// m×d matrix of principal values for the rows of `x`.
    pub fn transform(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.check_cols(x.ncols(), self.p())?;
        let rows = map_range(x.nrows(), |i| self.encode_row(x.row(i)).0);
        Ok(stack_rows(rows, self.d()))
    }

    /// Point mean + Σ_k s^k(y_k) of the manifold for each row of `y`.
    pub fn reconstruct(&self, y: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.check_cols(y.ncols(), self.d())?;
        let rows = map_range(y.nrows(), |i| self.decode_row(y.row(i)));
        Ok(stack_rows(rows, self.p()))
    }

    fn decode_row(&self, y: ArrayView1<'_, f64>) -> Array1<f64> {
        let mut x = self.mean.clone();
        for (reg, &t) in self.regressors.iter().zip(y.iter()) {
            x += &reg.evaluate(t);
        }
        x
    }

    /// F^d(x) = (Id − s^d∘P_{a^d})∘…∘(Id − s^1∘P_{a^1})(x − mean). Zero on
    /// the manifold.
    pub fn evaluate_f(&self, x: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        Ok(self.encode(x)?.1)
    }

    /// σ²(R^0), …, σ²(R^d) of `x` under this model, centring with the
    /// stored mean.
    pub fn residual_variances(&self, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        self.check_cols(x.ncols(), self.p())?;
        let n = x.nrows();
        let per_row = map_range(n, |i| {
            let mut r = &x.row(i) - &self.mean;
            let mut sq = Vec::with_capacity(self.d() + 1);
            sq.push(r.dot(&r));
            for reg in &self.regressors {
                let t = reg.axis().dot(&r);
                r -= &reg.evaluate(t);
                sq.push(r.dot(&r));
            }
            sq
        });
        let mut out = vec![0.0; self.d() + 1];
        for row in per_row {
            for (acc, v) in out.iter_mut().zip(row) {
                *acc += v;
            }
        }
        Ok(out.into_iter().map(|v| v / n.max(1) as f64).collect())
    }

    /// Evaluates ⟨a^j, s^k(t)⟩ over probe grids for all (j, k). `probes`
    /// holds one grid per regressor, or a single grid shared by all.
    pub fn check_additive(&self, probes: &[Vec<f64>]) -> AdditivityReport {
        let d = self.d();
        let grid = |k: usize| -> &[f64] {
            match probes.len() {
                0 => &[],
                1 => &probes[0],
                _ => &probes[k.min(probes.len() - 1)],
            }
        };
        let axes = self.axes();
        let mut deviations = vec![vec![0.0; d]; d];
        for (k, reg) in self.regressors.iter().enumerate() {
            for &t in grid(k) {
                let s = reg.evaluate(t);
                for (j, a) in axes.iter().enumerate() {
                    let target = if j == k { t } else { 0.0 };
                    let dev = (a.dot(&s) - target).abs();
                    if dev > deviations[j][k] {
                        deviations[j][k] = dev;
                    }
                }
            }
        }
        let mut max_structural = 0.0_f64;
        let mut max_cross = 0.0_f64;
        for (j, row) in deviations.iter().enumerate() {
            for (k, &dev) in row.iter().enumerate() {
                if j <= k {
                    max_structural = max_structural.max(dev);
                } else {
                    max_cross = max_cross.max(dev);
                }
            }
        }
        AdditivityReport {
            deviations,
            max_structural,
            max_cross,
            additive: max_structural.max(max_cross) <= ADDITIVE_TOL,
        }
    }
}

fn stack_rows(rows: Vec<Array1<f64>>, width: usize) -> Array2<f64> {
    let mut out = Array2::zeros((rows.len(), width));
    for (mut dst, src) in out.rows_mut().into_iter().zip(rows) {
        dst.assign(&src);
    }
    out
}

/// σ²(X) of a raw data matrix, after centring with its own mean.
pub fn total_variance(x: ArrayView2<'_, f64>) -> f64 {
    mean_sq_norm(crate::data::center_values(x).centered.view())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regressors::RegressorSpec;
    use ndarray::array;

    fn plane_data() -> DataMatrix {
        // rank-2 data in R^3
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                let s = (i as f64 * 0.7).sin() * 2.0;
                let c = (i as f64 * 1.3).cos();
                vec![s + c, s - c, 0.5 * s]
            })
            .collect();
        DataMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn rejects_bad_dimension() {
        let data = plane_data();
        for d in [0, 4] {
            assert!(matches!(
                fit(&data, d, IndexKind::ProjectedVariance, &RegressorSpec::Linear),
                Err(Error::Spec(_))
            ));
        }
        let one = DataMatrix::new(array![[1.0, 2.0]]).unwrap();
        assert!(fit(&one, 1, IndexKind::ProjectedVariance, &RegressorSpec::Linear).is_err());
    }

    #[test]
    fn rejects_diagnostic_index() {
        let data = plane_data();
        assert!(matches!(
            fit(&data, 1, IndexKind::DiagnosticSammon, &RegressorSpec::Linear),
            Err(Error::NotOptimizable(_))
        ));
    }

    #[test]
    fn constant_data_names_axis_step() {
        let data = DataMatrix::new(Array2::from_elem((5, 2), 3.0)).unwrap();
        let err = fit(&data, 1, IndexKind::ProjectedVariance, &RegressorSpec::Linear).unwrap_err();
        assert!(err.to_string().contains("[A]"));
        assert!(matches!(err.root(), Error::NothingToFit));
    }

    #[test]
    fn spline_constraint_checked_up_front() {
        let data = plane_data();
        assert!(matches!(
            fit(&data, 1, IndexKind::ProjectedVariance, &RegressorSpec::spline(9)),
            Err(Error::Spec(_))
        ));
    }

    #[test]
    fn early_stop_pads_q_curve() {
        let data = plane_data();
        let (model, report) = fit(&data, 3, IndexKind::ProjectedVariance, &RegressorSpec::Linear).unwrap();
        assert_eq!(report.status, FitStatus::StoppedEarly { completed: 2 });
        assert_eq!(model.d(), 2);
        assert_eq!(model.q_curve().len(), 3);
        assert_eq!(report.q_curve.len(), 4);
        assert_eq!(report.q_curve[3], 1.0);
        assert!((report.q_curve[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn q_threshold_stops() {
        let data = plane_data();
        let mut config = FitConfig::new(3, IndexKind::ProjectedVariance, RegressorSpec::Linear);
        config.q_threshold = Some(0.5);
        let (model, report) = fit_with(&data, &config).unwrap();
        assert_eq!(report.status, FitStatus::ReachedThreshold { completed: 1 });
        assert_eq!(model.d(), 1);
    }

    #[test]
    fn shape_errors() {
        let data = plane_data();
        let (model, _) = fit(&data, 2, IndexKind::ProjectedVariance, &RegressorSpec::Linear).unwrap();
        assert!(matches!(model.transform(array![[1.0, 2.0]].view()), Err(Error::Shape { .. })));
        assert!(matches!(model.reconstruct(array![[1.0]].view()), Err(Error::Shape { .. })));
        assert!(matches!(model.evaluate_f(array![1.0].view()), Err(Error::Shape { .. })));
    }

    #[test]
    fn mean_maps_to_zero() {
        let data = plane_data();
        let (model, _) = fit(&data, 2, IndexKind::ProjectedVariance, &RegressorSpec::Linear).unwrap();
        let y = model.transform(model.mean().insert_axis(ndarray::Axis(0))).unwrap();
        assert!(y.iter().all(|v| v.abs() < 1e-15));
        let back = model.reconstruct(Array2::zeros((1, 2)).view()).unwrap();
        assert_eq!(back.row(0), model.mean());
    }
}
