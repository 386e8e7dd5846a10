//! Versioned JSON model files.
//!
//! Floats are written in scientific notation with 17 significant digits,
//! which round-trips every finite f64 exactly.

use std::fs;
use std::io;
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use super::AutoAssociativeModel;
use crate::indices::IndexKind;
use crate::numerics::{KernelKind, KernelSpec, SplineBasis};
use crate::regressors::{FittedRegressor, RegressorModel, RegressorSpec};
use crate::{Error, Result};

pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    version: u32,
    p: usize,
    d: usize,
    mean: Vec<f64>,
    axes: Vec<Vec<f64>>,
    q_curve: Vec<f64>,
    index: IndexFile,
    regressor_spec: RegressorSpec,
    y_ranges: Vec<[f64; 2]>,
    regressors: Vec<RegressorFile>,
}

#[derive(Serialize, Deserialize)]
struct IndexFile {
    #[serde(flatten)]
    kind: IndexKind,
    symmetric_contiguity: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RegressorFile {
    Linear {
        b: Vec<f64>,
    },
    Kernel {
        kernel: KernelKind,
        bandwidth: f64,
        y: Vec<f64>,
        coords: Vec<Vec<f64>>,
        complement: Vec<Vec<f64>>,
    },
    Spline {
        knot_count: usize,
        t_min: f64,
        t_max: f64,
        coefficients: Vec<Vec<f64>>,
        complement: Vec<Vec<f64>>,
    },
}

fn rows_of(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn matrix(rows: &[Vec<f64>], nrows: usize, ncols: usize, what: &str) -> Result<Array2<f64>> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Format(format!("{what} must be {nrows}x{ncols}")));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Array2::from_shape_vec((nrows, ncols), flat).map_err(|e| Error::Format(e.to_string()))
}

fn vector(v: &[f64], len: usize, what: &str) -> Result<Array1<f64>> {
    if v.len() != len {
        return Err(Error::Format(format!("{what} must have length {len}, found {}", v.len())));
    }
    Ok(Array1::from_vec(v.to_vec()))
}

impl From<&AutoAssociativeModel> for ModelFile {
    fn from(m: &AutoAssociativeModel) -> Self {
        let regressors = m
            .regressors()
            .iter()
            .map(|r| match r.model() {
                RegressorModel::Linear { b } => RegressorFile::Linear { b: b.to_vec() },
                RegressorModel::Kernel {
                    kernel,
                    y,
                    coords,
                    complement,
                } => RegressorFile::Kernel {
                    kernel: kernel.kind,
                    bandwidth: kernel.bandwidth(),
                    y: y.to_vec(),
                    coords: rows_of(coords),
                    complement: rows_of(complement),
                },
                RegressorModel::Spline {
                    basis,
                    coefficients,
                    complement,
                } => {
                    let (t_min, t_max) = basis.range();
                    RegressorFile::Spline {
                        knot_count: basis.knot_count(),
                        t_min,
                        t_max,
                        coefficients: rows_of(coefficients),
                        complement: rows_of(complement),
                    }
                }
            })
            .collect();
        ModelFile {
            version: MODEL_VERSION,
            p: m.p(),
            d: m.d(),
            mean: m.mean().to_vec(),
            axes: m.axes().iter().map(|a| a.to_vec()).collect(),
            q_curve: m.q_curve().to_vec(),
            index: IndexFile {
                kind: m.index(),
                symmetric_contiguity: m.symmetric_contiguity(),
            },
            regressor_spec: m.regressor_spec(),
            y_ranges: m.y_ranges().to_vec(),
            regressors,
        }
    }
}

impl TryFrom<ModelFile> for AutoAssociativeModel {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<Self> {
        if f.version != MODEL_VERSION {
            return Err(Error::Format(format!(
                "unsupported model version {} (expected {MODEL_VERSION})",
                f.version
            )));
        }
        let (p, d) = (f.p, f.d);
        if p == 0 || d > p {
            return Err(Error::Format(format!("invalid dimensions p={p}, d={d}")));
        }
        let mean = vector(&f.mean, p, "mean")?;
        if f.axes.len() != d || f.regressors.len() != d || f.y_ranges.len() != d {
            return Err(Error::Format(format!("expected {d} axes, regressors and ranges")));
        }
        if f.q_curve.len() != d + 1 {
            return Err(Error::Format(format!("q_curve must have length {}", d + 1)));
        }
        let all_finite = f.mean.iter().chain(f.q_curve.iter()).chain(f.axes.iter().flatten()).all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::Format("non-finite value".into()));
        }

        let mut regressors = Vec::with_capacity(d);
        for (k, (axis, reg)) in f.axes.iter().zip(f.regressors).enumerate() {
            let axis = vector(axis, p, "axis")?;
            if ((axis.dot(&axis)).sqrt() - 1.0).abs() > 1e-8 {
                return Err(Error::Format(format!("axis {} is not a unit vector", k + 1)));
            }
            let m = p - (k + 1);
            let model = match reg {
                RegressorFile::Linear { b } => RegressorModel::Linear {
                    b: vector(&b, p, "linear axis b")?,
                },
                RegressorFile::Kernel {
                    kernel,
                    bandwidth,
                    y,
                    coords,
                    complement,
                } => {
                    let n = y.len();
                    if n == 0 {
                        return Err(Error::Format("kernel regressor without training values".into()));
                    }
                    RegressorModel::Kernel {
                        kernel: KernelSpec::new(kernel, bandwidth).map_err(|e| Error::Format(e.to_string()))?,
                        y: Array1::from_vec(y),
                        coords: matrix(&coords, n, m, "kernel coords")?,
                        complement: matrix(&complement, p, m, "complement")?,
                    }
                }
                RegressorFile::Spline {
                    knot_count,
                    t_min,
                    t_max,
                    coefficients,
                    complement,
                } => {
                    let basis =
                        SplineBasis::new(knot_count, t_min, t_max).map_err(|e| Error::Format(e.to_string()))?;
                    RegressorModel::Spline {
                        coefficients: matrix(&coefficients, basis.size(), m, "spline coefficients")?,
                        basis,
                        complement: matrix(&complement, p, m, "complement")?,
                    }
                }
            };
            regressors.push(FittedRegressor::from_parts(axis, model));
        }
        Ok(AutoAssociativeModel::from_parts(
            mean,
            regressors,
            f.q_curve,
            f.index.kind,
            f.index.symmetric_contiguity,
            f.regressor_spec,
            f.y_ranges,
        ))
    }
}

/// Pretty-printed JSON with every float written as `{:.16e}`.
struct FullPrecision<'a>(PrettyFormatter<'a>);

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn end_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_key(writer)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Serialises any value with the model file's float format.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialisation cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

pub fn to_json(model: &AutoAssociativeModel) -> String {
    to_json_string(&ModelFile::from(model))
}

pub fn from_json(text: &str) -> Result<AutoAssociativeModel> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    file.try_into()
}

pub fn save(model: &AutoAssociativeModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_json(model)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load(path: impl AsRef<Path>) -> Result<AutoAssociativeModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DataMatrix;
    use crate::model::fit;

    fn small_model() -> AutoAssociativeModel {
        let rows: Vec<Vec<f64>> = (0..15)
            .map(|i| {
                let t = i as f64 / 7.0 - 1.0;
                vec![t, t * t + 0.01 * (i as f64).sin(), 0.3 * (3.0 * t).cos()]
            })
            .collect();
        let data = DataMatrix::from_rows(&rows).unwrap();
        fit(&data, 2, IndexKind::ProjectedVariance, &RegressorSpec::Linear).unwrap().0
    }

    #[test]
    fn floats_use_seventeen_digits() {
        let text = to_json(&small_model());
        assert!(text.contains("\"version\": 1"));
        assert!(text.contains("0.0000000000000000e0"));
    }

    #[test]
    fn round_trip() {
        let model = small_model();
        let back = from_json(&to_json(&model)).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn version_mismatch() {
        let text = to_json(&small_model()).replacen("\"version\": 1", "\"version\": 2", 1);
        assert!(matches!(from_json(&text), Err(Error::Format(m)) if m.contains("version")));
    }

    #[test]
    fn truncated_file() {
        let text = to_json(&small_model());
        let cut = &text[..text.len() / 2];
        assert!(matches!(from_json(cut), Err(Error::Format(_))));
    }

    #[test]
    fn inconsistent_shapes() {
        let text = to_json(&small_model()).replacen("\"d\": 2", "\"d\": 1", 1);
        assert!(matches!(from_json(&text), Err(Error::Format(_))));
    }
}
