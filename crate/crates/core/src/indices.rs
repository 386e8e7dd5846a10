//! Projection indices and the axis solver of step [A].
//!
//! Two indices can be maximised in closed form: the projected variance
//! (top eigenvector of the residual covariance) and the contiguity
//! quotient, a Rayleigh quotient of the residual covariance V over the
//! nearest-neighbour scatter V*. Two distance-preservation criteria
//! (Demartines–Hérault and Sammon) are available for evaluation only.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::numerics::{complete_basis, covariance, sign_normalize, sym_eigen};
use crate::par::{map_range, sum_range};
use crate::{Error, Result};

/// Eigenvalues of the reduced local covariance below this fraction of the
/// largest are treated as its null space.
pub const RANGE_TOL_RATIO: f64 = 1e-10;

const UNIT_TOL: f64 = 1e-10;

/// First-order nearest-neighbour relation: m_{i,j} = 1 iff
/// j = `neighbor_of[i]` (or, when symmetrised, iff i = `neighbor_of[j]`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContiguityMatrix {
    neighbor_of: Vec<usize>,
    symmetric: bool,
}

impl ContiguityMatrix {
    pub fn neighbor_of(&self) -> &[usize] {
        &self.neighbor_of
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// The relation m ∨ mᵗ.
    pub fn symmetrized(mut self) -> Self {
        self.symmetric = true;
        self
    }

    pub fn len(&self) -> usize {
        self.neighbor_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbor_of.is_empty()
    }

    /// All (i, j) with m_{i,j} = 1, in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self.neighbor_of.iter().copied().enumerate().collect();
        if self.symmetric {
            pairs.extend(self.neighbor_of.iter().enumerate().map(|(i, &j)| (j, i)));
            pairs.sort_unstable();
            pairs.dedup();
        }
        pairs
    }
}

/// Which projection index drives step [A].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndexKind {
    ProjectedVariance,
    Contiguity,
    /// Demartines–Hérault with H(u) = exp(−u / h_scale). Evaluation only.
    DiagnosticDh { h_scale: f64 },
    /// Sammon's stress ratio. Evaluation only.
    DiagnosticSammon,
}

impl IndexKind {
    pub fn name(&self) -> &'static str {
        match self {
            IndexKind::ProjectedVariance => "projected_variance",
            IndexKind::Contiguity => "contiguity",
            IndexKind::DiagnosticDh { .. } => "diagnostic_dh",
            IndexKind::DiagnosticSammon => "diagnostic_sammon",
        }
    }

    pub fn is_optimizable(&self) -> bool {
        matches!(self, IndexKind::ProjectedVariance | IndexKind::Contiguity)
    }

    /// Index value of direction `x` on `residuals`. The contiguity relation
    /// is rebuilt from the residuals.
    pub fn evaluate(&self, residuals: ArrayView2<'_, f64>, x: ArrayView1<'_, f64>) -> Result<f64> {
        match *self {
            IndexKind::ProjectedVariance => variance_index(residuals, x),
            IndexKind::Contiguity => contiguity_index(residuals, &nearest_neighbors(residuals)?, x),
            IndexKind::DiagnosticDh { h_scale } => diagnostic_dh(residuals, x, h_scale),
            IndexKind::DiagnosticSammon => diagnostic_sammon(residuals, x),
        }
    }
}

fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn proj_diff(x: ArrayView1<'_, f64>, a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    x.iter().zip(a.iter().zip(b.iter())).map(|(w, (u, v))| w * (u - v)).sum()
}

fn check_unit(x: ArrayView1<'_, f64>, p: usize) -> Result<()> {
    if x.len() != p {
        return Err(Error::Shape { expected: p, got: x.len() });
    }
    let len = x.dot(&x).sqrt();
    if (len - 1.0).abs() > UNIT_TOL {
        return Err(Error::Domain(format!("direction must be a unit vector, norm is {len}")));
    }
    Ok(())
}

/// Brute-force Euclidean nearest neighbour of every row; ties go to the
/// smallest index.
pub fn nearest_neighbors(residuals: ArrayView2<'_, f64>) -> Result<ContiguityMatrix> {
    let n = residuals.nrows();
    if n < 2 {
        return Err(Error::Domain(format!("nearest neighbours need at least 2 samples, got {n}")));
    }
    let neighbor_of = map_range(n, |i| {
        let ri = residuals.row(i);
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for j in (0..n).filter(|&j| j != i) {
            let d = sq_dist(ri, residuals.row(j));
            if d < best_d || best == usize::MAX {
                best = j;
                best_d = d;
            }
        }
        best
    });
    Ok(ContiguityMatrix {
        neighbor_of,
        symmetric: false,
    })
}

/// (1/n)·Σ_i ⟨x, R_i⟩²
pub fn variance_index(residuals: ArrayView2<'_, f64>, x: ArrayView1<'_, f64>) -> Result<f64> {
    check_unit(x, residuals.ncols())?;
    let n = residuals.nrows();
    Ok(sum_range(n, |i| residuals.row(i).dot(&x).powi(2)) / n as f64)
}

/// Σ_i ⟨x, R_i⟩² over Σ_{i,j} m_{i,j}⟨x, R_i − R_j⟩².
pub fn contiguity_index(residuals: ArrayView2<'_, f64>, m: &ContiguityMatrix, x: ArrayView1<'_, f64>) -> Result<f64> {
    check_unit(x, residuals.ncols())?;
    if m.len() != residuals.nrows() {
        return Err(Error::Shape {
            expected: residuals.nrows(),
            got: m.len(),
        });
    }
    let numerator = sum_range(residuals.nrows(), |i| residuals.row(i).dot(&x).powi(2));
    let pairs = m.pairs();
    let denominator = sum_range(pairs.len(), |k| {
        let (i, j) = pairs[k];
        proj_diff(x, residuals.row(i), residuals.row(j)).powi(2)
    });
    if denominator <= 0.0 {
        return Err(Error::DegenerateDirection(
            "direction annihilates every nearest-neighbour difference".into(),
        ));
    }
    Ok(numerator / denominator)
}

/// V* = (1/n)·Σ_{i,j} m_{i,j}(R_i − R_j)(R_i − R_j)ᵗ
pub fn local_covariance(residuals: ArrayView2<'_, f64>, m: &ContiguityMatrix) -> Result<Array2<f64>> {
    let (n, p) = residuals.dim();
    if n < 2 {
        return Err(Error::Domain(format!("local covariance needs at least 2 samples, got {n}")));
    }
    let pairs = m.pairs();
    let mut diffs = Array2::zeros((pairs.len(), p));
    for (mut row, &(i, j)) in diffs.rows_mut().into_iter().zip(pairs.iter()) {
        row.assign(&(&residuals.row(i) - &residuals.row(j)));
    }
    let mut v = covariance(diffs.view());
    // covariance() divides by the pair count; V* is normalised by n
    v *= pairs.len() as f64 / n as f64;
    Ok(v)
}

/// Maximiser of the index over unit vectors orthogonal to `forbidden`.
pub fn solve_axis(residuals: ArrayView2<'_, f64>, kind: IndexKind, forbidden: &[Array1<f64>]) -> Result<Array1<f64>> {
    solve_axis_with(residuals, kind, forbidden, false)
}

/// [`solve_axis`] with control over symmetrising the contiguity relation.
pub fn solve_axis_with(
    residuals: ArrayView2<'_, f64>,
    kind: IndexKind,
    forbidden: &[Array1<f64>],
    symmetric_contiguity: bool,
) -> Result<Array1<f64>> {
    if !kind.is_optimizable() {
        return Err(Error::NotOptimizable(kind.name()));
    }
    let p = residuals.ncols();
    if forbidden.len() >= p {
        return Err(Error::Domain(format!("{} forbidden axes leave no feasible direction in R^{p}", forbidden.len())));
    }
    if residuals.iter().all(|v| *v == 0.0) {
        return Err(Error::NothingToFit);
    }
    let basis = complete_basis(forbidden, p)?;
    let v = covariance(residuals);
    let reduced_v = basis.t().dot(&v).dot(&basis);

    let reduced_dir = match kind {
        IndexKind::ProjectedVariance => {
            let eig = sym_eigen(reduced_v.view())?;
            if eig.values[0] <= 0.0 {
                return Err(Error::NothingToFit);
            }
            eig.vectors.column(0).to_owned()
        }
        IndexKind::Contiguity => {
            let mut m = nearest_neighbors(residuals)?;
            if symmetric_contiguity {
                m = m.symmetrized();
            }
            let local = local_covariance(residuals, &m)?;
            let reduced_local = basis.t().dot(&local).dot(&basis);
            whitened_top_direction(reduced_v.view(), reduced_local.view())?
        }
        _ => unreachable!("checked optimizable above"),
    };

    let mut x = basis.dot(&reduced_dir);
    // strip rounding-level components along the forbidden axes
    for a in forbidden {
        let c = a.dot(&x);
        x.scaled_add(-c, a);
    }
    let len = x.dot(&x).sqrt();
    x /= len;
    sign_normalize(&mut x);
    Ok(x)
}

/// Top generalised eigenvector of (V, V*) restricted to the range of V*:
/// with V* = U D Uᵗ on its range, the symmetric problem
/// D^{-1/2} Uᵗ V U D^{-1/2} z = λ z is solved and U D^{-1/2} z returned.
fn whitened_top_direction(v: ArrayView2<'_, f64>, local: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
    let q = v.nrows();
    let eig = sym_eigen(local)?;
    let lambda_max = eig.values.first().copied().unwrap_or(0.0);
    if lambda_max <= 0.0 {
        return Err(Error::DegenerateNeighborhood);
    }
    let keep: Vec<usize> = (0..q).filter(|&j| eig.values[j] > RANGE_TOL_RATIO * lambda_max).collect();
    let r = keep.len();
    let mut w = Array2::zeros((q, r));
    for (c, &j) in keep.iter().enumerate() {
        let scale = 1.0 / eig.values[j].sqrt();
        w.column_mut(c).assign(&(&eig.vectors.column(j) * scale));
    }
    let mut whitened = w.t().dot(&v).dot(&w);
    crate::numerics::symmetrize(&mut whitened);
    let top = sym_eigen(whitened.view())?;
    Ok(w.dot(&top.vectors.column(0)))
}

/// Sum over ordered pairs i ≠ j of f(‖R_i − R_j‖, |⟨x, R_i − R_j⟩|),
/// accumulated row by row in index order.
fn pairwise_sum<F>(residuals: ArrayView2<'_, f64>, x: ArrayView1<'_, f64>, f: F) -> f64
where
    F: Fn(f64, f64) -> f64 + Sync + Send,
{
    let n = residuals.nrows();
    sum_range(n, |i| {
        let ri = residuals.row(i);
        (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                let rj = residuals.row(j);
                f(sq_dist(ri, rj).sqrt(), proj_diff(x, ri, rj).abs())
            })
            .sum::<f64>()
    })
}

/// Σ_{i≠j} (‖R_i − R_j‖ − |⟨x, R_i − R_j⟩|)² · exp(−|⟨x, R_i − R_j⟩| / h_scale)
pub fn diagnostic_dh(residuals: ArrayView2<'_, f64>, x: ArrayView1<'_, f64>, h_scale: f64) -> Result<f64> {
    check_unit(x, residuals.ncols())?;
    if !(h_scale > 0.0 && h_scale.is_finite()) {
        return Err(Error::Domain(format!("H scale must be positive, got {h_scale}")));
    }
    Ok(pairwise_sum(residuals, x, |dist, proj| (dist - proj).powi(2) * (-proj / h_scale).exp()))
}

/// Σ_{i≠j} (‖R_i − R_j‖ − |⟨x, R_i − R_j⟩|)² over Σ_{i≠j} ⟨x, R_i − R_j⟩².
pub fn diagnostic_sammon(residuals: ArrayView2<'_, f64>, x: ArrayView1<'_, f64>) -> Result<f64> {
    check_unit(x, residuals.ncols())?;
    let stress = pairwise_sum(residuals, x, |dist, proj| (dist - proj).powi(2));
    let spread = pairwise_sum(residuals, x, |_, proj| proj * proj);
    let scale = pairwise_sum(residuals, x, |dist, _| dist * dist);
    if spread <= 1e-24 * scale {
        return Err(Error::DegenerateDirection("all projected pairwise distances are zero".into()));
    }
    Ok(stress / spread)
}

/// Median of |⟨x, R_i − R_{nn(i)}⟩|, the default scale of H in I_DH.
pub fn default_dh_scale(residuals: ArrayView2<'_, f64>, m: &ContiguityMatrix, x: ArrayView1<'_, f64>) -> Result<f64> {
    let mut proj: Vec<f64> = m
        .neighbor_of()
        .iter()
        .enumerate()
        .map(|(i, &j)| proj_diff(x, residuals.row(i), residuals.row(j)).abs())
        .collect();
    proj.sort_by(f64::total_cmp);
    let n = proj.len();
    let median = if n % 2 == 1 {
        proj[n / 2]
    } else {
        0.5 * (proj[n / 2 - 1] + proj[n / 2])
    };
    if median > 0.0 {
        Ok(median)
    } else {
        Err(Error::DegenerateDirection("median projected neighbour distance is zero".into()))
    }
}
