//! Auto-associative models: a nonlinear generalisation of PCA.
//!
//! A d-dimensional model is built by a projection pursuit regression loop.
//! At each iteration an axis is chosen by maximising a projection index
//! under orthogonality constraints, the residuals are projected on that
//! axis, a univariate regression function is estimated, and the residuals
//! are updated by subtracting it. The zero set of the resulting
//! auto-associative function is a d-dimensional manifold approximating the
//! data; with the projected-variance index and linear regressors the
//! procedure reproduces classical PCA.
//!
//! ```no_run
//! use autoassoc::prelude::*;
//!
//! let data = generate(&GeneratorSpec::s_shape(100, 0.05, 7))?;
//! let (model, report) = fit(&data, 1, IndexKind::Contiguity, &RegressorSpec::spline(4))?;
//! println!("Q_1 = {:.4}", model.q_curve()[1]);
//! let y = model.transform(data.values())?;
//! let manifold_points = model.reconstruct(y.view())?;
//! # let _ = (report, manifold_points);
//! # Ok::<(), autoassoc::Error>(())
//! ```

pub mod cli;
pub mod data;
mod error;
pub mod indices;
pub mod model;
pub mod numerics;
mod par;
pub mod regressors;
pub mod synthetic;

pub use error::{Error, Result, Step};

pub mod prelude {
    pub use crate::data::{center, init_state, load_csv, CenteredDataset, DataMatrix, ResidualState};
    pub use crate::indices::{solve_axis, ContiguityMatrix, IndexKind};
    pub use crate::model::{fit, fit_with, AutoAssociativeModel, FitConfig, FitReport, FitStatus};
    pub use crate::regressors::{BandwidthRule, FittedRegressor, RegressorSpec};
    pub use crate::synthetic::{generate, pca_oracle, GeneratorKind, GeneratorSpec};
    pub use crate::{Error, Result};
}
