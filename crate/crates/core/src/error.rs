use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Stage of the fitting loop an error was raised in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Axis,
    Projection,
    Regression,
    Update,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self {
            Step::Axis => "[A] axis",
            Step::Projection => "[P] projection",
            Step::Regression => "[R] regression",
            Step::Update => "[U] update",
        };
        f.write_str(tag)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// `row` is the 1-based line number in the source file.
    #[error("parse error at row {row}{}: {message}", .col.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        row: usize,
        col: Option<usize>,
        message: String,
    },

    #[error("empty input")]
    EmptyInput,

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular design matrix (condition estimate {condition:.3e})")]
    SingularDesign { condition: f64 },

    #[error("degenerate direction: {0}")]
    DegenerateDirection(String),

    #[error("nothing to fit: residuals are identically zero")]
    NothingToFit,

    #[error("degenerate neighbourhood: local covariance vanishes on the feasible subspace")]
    DegenerateNeighborhood,

    #[error("zero projected variance along the axis")]
    ZeroProjectedVariance,

    #[error("degenerate projection: all principal values are identical")]
    DegenerateProjection,

    #[error("index {0} cannot be used for axis optimisation")]
    NotOptimizable(&'static str),

    #[error("invalid parameters: {0}")]
    Spec(String),

    #[error("shape mismatch: expected {expected} columns, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("malformed model file: {0}")]
    Format(String),

    #[error("orthogonality violated after update: |<a^{axis}, R_{sample}>| = {value:.3e}")]
    Orthogonality { axis: usize, sample: usize, value: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("step {step} failed at iteration {iteration}: {source}")]
    Fit {
        step: Step,
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(step: Step, iteration: usize) -> impl FnOnce(Error) -> Error {
        move |source| Error::Fit {
            step,
            iteration,
            source: Box::new(source),
        }
    }

    /// The innermost error, skipping `Fit` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Fit { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for errors caused by the environment or the invocation rather
    /// than by the numerical computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self.root(),
            Error::Io { .. }
                | Error::Parse { .. }
                | Error::EmptyInput
                | Error::InvalidData(_)
                | Error::Spec(_)
                | Error::Shape { .. }
                | Error::Format(_)
        )
    }
}
