//! Dataset ingestion, centring and the residual bookkeeping of the fitting loop.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::{Error, Result};

/// An n×p sample matrix, one sample per row, all entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Array2<f64>,
    column_names: Option<Vec<String>>,
}

impl DataMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        Self::with_names(values, None)
    }

    pub fn with_names(values: Array2<f64>, column_names: Option<Vec<String>>) -> Result<Self> {
        let (n, p) = values.dim();
        if n == 0 || p == 0 {
            return Err(Error::EmptyInput);
        }
        if let Some(((i, j), v)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidData(format!("non-finite value {v} at ({i}, {j})")));
        }
        if let Some(names) = &column_names {
            if names.len() != p {
                return Err(Error::Shape {
                    expected: p,
                    got: names.len(),
                });
            }
        }
        Ok(Self {
            values,
            column_names,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::Parse {
                row: bad + 1,
                col: None,
                message: format!("expected {p} columns, found {}", rows[bad].len()),
            });
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let values = Array2::from_shape_vec((n, p), flat).map_err(|e| Error::InvalidData(e.to_string()))?;
        Self::new(values)
    }

    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn p(&self) -> usize {
        self.values.ncols()
    }

    pub fn column_names(&self) -> Option<&[String]> {
        self.column_names.as_deref()
    }
}

/// Reads a comma-separated file of numbers.
///
/// Row numbers in errors are 1-based line numbers of the file, header
/// included.
pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<DataMatrix> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(io_err)?;
    parse_csv(&text, has_header)
}

/// Parses CSV text; see [`load_csv`].
pub fn parse_csv(text: &str, has_header: bool) -> Result<DataMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut names = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            row: e.position().map_or(0, |p| p.line() as usize),
            col: None,
            message: e.to_string(),
        })?;
        let line = record.position().map_or(rows.len() + 1, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::Parse {
                    row: line,
                    col: None,
                    message: format!("expected {w} columns, found {}", record.len()),
                })
            }
            Some(_) => {}
        }
        if has_header && names.is_none() {
            names = Some(record.iter().map(str::to_owned).collect::<Vec<_>>());
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(j, cell)| {
                cell.parse::<f64>().map_err(|_| Error::Parse {
                    row: line,
                    col: Some(j + 1),
                    message: format!("not a number: {cell:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let p = rows[0].len();
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    let values = Array2::from_shape_vec((rows.len(), p), flat).map_err(|e| Error::InvalidData(e.to_string()))?;
    DataMatrix::with_names(values, names)
}

/// Writes a matrix as CSV with full round-trip precision.
pub fn write_csv<W: std::io::Write>(out: W, header: Option<&[String]>, values: ArrayView2<'_, f64>) -> std::io::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    if let Some(h) = header {
        writer.write_record(h)?;
    }
    for row in values.rows() {
        writer.write_record(row.iter().map(|v| format_f64(*v)))?;
    }
    writer.flush()
}

/// Shortest decimal representation that parses back to the same value.
pub fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

/// A centred copy of the data together with the subtracted mean.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredDataset {
    pub centered: Array2<f64>,
    pub mean: Array1<f64>,
    /// (1/n)·Σ‖row‖²
    pub total_variance: f64,
}

impl CenteredDataset {
    pub fn n(&self) -> usize {
        self.centered.nrows()
    }

    pub fn p(&self) -> usize {
        self.centered.ncols()
    }
}

pub fn center(data: &DataMatrix) -> CenteredDataset {
    center_values(data.values())
}

pub(crate) fn center_values(values: ArrayView2<'_, f64>) -> CenteredDataset {
    let n = values.nrows() as f64;
    let mean = values.sum_axis(Axis(0)) / n;
    let mut centered = values.to_owned();
    for mut row in centered.rows_mut() {
        row -= &mean;
    }
    // The first pass leaves a rounding-level offset; one correction pass
    // removes it.
    let drift = centered.sum_axis(Axis(0)) / n;
    for mut row in centered.rows_mut() {
        row -= &drift;
    }
    let mean = mean + drift;
    let total_variance = mean_sq_norm(centered.view());
    CenteredDataset {
        centered,
        mean,
        total_variance,
    }
}

/// (1/n)·Σ_i ‖row_i‖², accumulated row by row in index order.
pub fn mean_sq_norm(values: ArrayView2<'_, f64>) -> f64 {
    let n = values.nrows();
    if n == 0 {
        return 0.0;
    }
    values.rows().into_iter().map(|r| r.dot(&r)).sum::<f64>() / n as f64
}

/// Residuals R^k of the fitting loop together with the axes found so far.
#[derive(Debug, Clone)]
pub struct ResidualState {
    residuals: Array2<f64>,
    axes: Vec<Array1<f64>>,
    principal_values: Vec<Array1<f64>>,
}

pub fn init_state(data: &CenteredDataset) -> ResidualState {
    ResidualState {
        residuals: data.centered.clone(),
        axes: Vec::new(),
        principal_values: Vec::new(),
    }
}

impl ResidualState {
    pub fn residuals(&self) -> ArrayView2<'_, f64> {
        self.residuals.view()
    }

    /// Number of completed iterations.
    pub fn step(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Array1<f64>] {
        &self.axes
    }

    /// n×k matrix whose column k holds Y^k.
    pub fn principal_values(&self) -> Array2<f64> {
        let n = self.residuals.nrows();
        let mut out = Array2::zeros((n, self.principal_values.len()));
        for (k, y) in self.principal_values.iter().enumerate() {
            out.column_mut(k).assign(y);
        }
        out
    }

    pub fn residual_variance(&self) -> f64 {
        mean_sq_norm(self.residuals.view())
    }

    /// Records a completed iteration: the axis, its principal values and
    /// the updated residuals.
    pub(crate) fn advance(&mut self, axis: Array1<f64>, y: Array1<f64>, residuals: Array2<f64>) {
        self.axes.push(axis);
        self.principal_values.push(y);
        self.residuals = residuals;
    }

    /// Largest violation of |⟨a^j, R_i⟩| ≤ tol·(1 + ‖R_i‖) over all recorded
    /// axes, as `(axis index, sample index, |⟨a^j, R_i⟩|)`.
    pub fn orthogonality_violation(&self, tol: f64) -> Option<(usize, usize, f64)> {
        for (i, row) in self.residuals.rows().into_iter().enumerate() {
            let bound = tol * (1.0 + row.dot(&row).sqrt());
            for (j, a) in self.axes.iter().enumerate() {
                let v = a.dot(&row).abs();
                if v > bound {
                    return Some((j, i, v));
                }
            }
        }
        None
    }
}
