//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when the computation fails, 2 for usage
//! and I/O errors. A `--config FILE` of `key = value` lines supplies
//! defaults for the subcommand's flags; flags on the command line win.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::Array2;
use serde::Serialize;

use crate::data::{load_csv, parse_csv, write_csv, DataMatrix};
use crate::indices::IndexKind;
use crate::model::{self, fit_with, total_variance, FitConfig, FitStatus, StepReport};
use crate::regressors::{BandwidthRule, RegressorSpec, DEFAULT_KNOTS};
use crate::synthetic::{generate, pca_oracle, GeneratorKind, GeneratorSpec};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "autoassoc", version, about = "Fit auto-associative models to point clouds")]
pub struct Cli {
    /// File of `key = value` defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset.
    Gen(GenArgs),
    /// Fit a model and write it as JSON.
    Fit(FitArgs),
    /// Principal values of the rows of a data file.
    Transform(TransformArgs),
    /// Map principal values back to the data space.
    Reconstruct(ReconstructArgs),
    /// Information ratio table of a model on a dataset.
    Report(ReportArgs),
    /// Sample the fitted manifold as a polyline (d = 1) or grid (d = 2).
    Manifold(ManifoldArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HeaderMode {
    Auto,
    Yes,
    No,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    SShape,
    Circle,
    LinearSubspace,
    TwoClusters,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IndexName {
    #[value(alias = "projected_variance")]
    Variance,
    Contiguity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegressorName {
    Linear,
    Kernel,
    Spline,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Ambient dimension.
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    /// Rank for linear_subspace.
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    #[arg(long, default_value_t = 3.0)]
    pub separation: f64,
    #[arg(long, default_value_t = 0.3)]
    pub spread: f64,
    /// Output CSV; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct FitArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = HeaderMode::Auto)]
    pub header: HeaderMode,
    #[arg(long, short)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = IndexName::Contiguity)]
    pub index: IndexName,
    #[arg(long, value_enum, default_value_t = RegressorName::Spline)]
    pub regressor: RegressorName,
    /// Kernel bandwidth; Silverman's rule when omitted.
    #[arg(long)]
    pub bandwidth: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_KNOTS)]
    pub knots: usize,
    #[arg(long, default_value_t = 0.0)]
    pub ridge: f64,
    /// Stop at the first k with Q_k at or above this value.
    #[arg(long)]
    pub q_threshold: Option<f64>,
    /// Symmetrise the nearest-neighbour relation.
    #[arg(long)]
    pub symmetric: bool,
    /// Where to write the model JSON.
    #[arg(long, short)]
    pub model: PathBuf,
    /// Where to write the fit report JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Include wall-clock timings in the report.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct TransformArgs {
    #[arg(long, short)]
    pub model: PathBuf,
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = HeaderMode::Auto)]
    pub header: HeaderMode,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct ReconstructArgs {
    #[arg(long, short)]
    pub model: PathBuf,
    /// CSV of principal values, one column per model dimension.
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = HeaderMode::Auto)]
    pub header: HeaderMode,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct ReportArgs {
    #[arg(long, short)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = HeaderMode::Auto)]
    pub header: HeaderMode,
    /// Print exact values as JSON instead of the table.
    #[arg(long)]
    pub json: bool,
    /// Add the cumulative explained variance of classical PCA.
    #[arg(long)]
    pub compare_pca: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct ManifoldArgs {
    #[arg(long, short)]
    pub model: PathBuf,
    /// Samples per axis.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Range of Y¹ as `lo,hi`; the training range by default.
    #[arg(long, value_parser = parse_range)]
    pub y1_range: Option<[f64; 2]>,
    /// Range of Y² as `lo,hi`; the training range by default.
    #[arg(long, value_parser = parse_range)]
    pub y2_range: Option<[f64; 2]>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn parse_range(s: &str) -> std::result::Result<[f64; 2], String> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| format!("expected lo,hi, got {s:?}"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{lo:?}: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{hi:?}: {e}"))?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(format!("range must satisfy lo < hi, got {s:?}"));
    }
    Ok([lo, hi])
}

/// Parses the arguments, runs the subcommand and returns the exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let args = match apply_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

fn config_path(args: &[String]) -> Option<(usize, usize, String)> {
    for (i, a) in args.iter().enumerate() {
        if a == "--" {
            return None;
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some((i, 1, v.to_string()));
        }
        if a == "--config" {
            return args.get(i + 1).map(|v| (i, 2, v.clone()));
        }
    }
    None
}

/// Expands `--config FILE` into flags placed right after the subcommand so
/// that later command-line flags override them.
fn apply_config(mut args: Vec<String>) -> Result<Vec<String>> {
    let Some((pos, len, path)) = config_path(&args) else {
        return Ok(args);
    };
    args.drain(pos..pos + len);
    let text = fs::read_to_string(&path).map_err(|source| Error::Io {
        path: path.clone().into(),
        source,
    })?;
    let mut extra = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            row: lineno + 1,
            col: None,
            message: format!("{path}: expected key = value"),
        })?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        match value.trim() {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            v => {
                extra.push(format!("--{key}"));
                extra.push(v.to_string());
            }
        }
    }
    let sub = args
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|i| i + 2)
        .unwrap_or(args.len());
    args.splice(sub..sub, extra);
    Ok(args)
}

pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Gen(a) => cmd_gen(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Transform(a) => cmd_transform(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Report(a) => cmd_report(a),
        Command::Manifold(a) => cmd_manifold(a),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn check_input(path: &Path) -> Result<()> {
    if !path.is_file() {
        return Err(Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
        });
    }
    Ok(())
}

fn check_output(path: &Path) -> Result<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = parent {
        if !dir.is_dir() {
            return Err(Error::Io {
                path: path.to_path_buf(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "output directory does not exist"),
            });
        }
    }
    Ok(())
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(io_err(p)),
        None => std::io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(io_err(Path::new("<stdout>"))),
    }
}

fn read_matrix(path: &Path, header: HeaderMode) -> Result<DataMatrix> {
    match header {
        HeaderMode::Yes => load_csv(path, true),
        HeaderMode::No => load_csv(path, false),
        HeaderMode::Auto => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
            let numeric = first.split(',').all(|c| c.trim().parse::<f64>().is_ok());
            parse_csv(&text, !numeric)
        }
    }
}

fn matrix_csv(header: &[String], values: ndarray::ArrayView2<'_, f64>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_csv(&mut buf, Some(header), values).map_err(io_err(Path::new("<buffer>")))?;
    Ok(buf)
}

fn names(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|j| format!("{prefix}{j}")).collect()
}

fn cmd_gen(a: &GenArgs) -> Result<()> {
    if let Some(o) = &a.output {
        check_output(o)?;
    }
    let kind = match a.kind {
        GenKind::SShape => GeneratorKind::SShape,
        GenKind::Circle => GeneratorKind::Circle,
        GenKind::LinearSubspace => GeneratorKind::LinearSubspace { rank: a.rank },
        GenKind::TwoClusters => GeneratorKind::TwoClusters {
            separation: a.separation,
            spread: a.spread,
        },
    };
    let spec = GeneratorSpec {
        kind,
        n: a.n,
        noise_sd: a.noise,
        seed: a.seed,
        ambient_p: a.p,
    };
    let data = generate(&spec)?;
    let bytes = matrix_csv(&names("x", data.p()), data.values())?;
    write_output(a.output.as_deref(), &bytes)
}

#[derive(Serialize)]
struct FitReportFile<'a> {
    d: usize,
    n: usize,
    p: usize,
    index: &'static str,
    regressor: RegressorSpec,
    #[serde(flatten)]
    status: FitStatus,
    total_variance: f64,
    q_curve: &'a [f64],
    steps: &'a [StepReport],
    warnings: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<Timings>,
}

#[derive(Serialize)]
struct Timings {
    load_seconds: f64,
    fit_seconds: f64,
}

fn cmd_fit(a: &FitArgs) -> Result<()> {
    check_input(&a.input)?;
    check_output(&a.model)?;
    if let Some(r) = &a.report {
        check_output(r)?;
    }
    let index = match a.index {
        IndexName::Variance => IndexKind::ProjectedVariance,
        IndexName::Contiguity => IndexKind::Contiguity,
    };
    let regressor = match a.regressor {
        RegressorName::Linear => RegressorSpec::Linear,
        RegressorName::Kernel => RegressorSpec::Kernel {
            bandwidth: match a.bandwidth {
                Some(h) => BandwidthRule::Fixed { h },
                None => BandwidthRule::Silverman,
            },
        },
        RegressorName::Spline => RegressorSpec::Spline {
            knots: a.knots,
            ridge: a.ridge,
        },
    };
    let mut config = FitConfig::new(a.d, index, regressor);
    config.q_threshold = a.q_threshold;
    config.symmetric_contiguity = a.symmetric;

    let t0 = Instant::now();
    let data = read_matrix(&a.input, a.header)?;
    let t1 = Instant::now();
    let (fitted, report) = fit_with(&data, &config)?;
    let t2 = Instant::now();
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }

    model::save(&fitted, &a.model)?;
    if let Some(path) = &a.report {
        let file = FitReportFile {
            d: a.d,
            n: data.n(),
            p: data.p(),
            index: index.name(),
            regressor,
            status: report.status,
            total_variance: report.total_variance,
            q_curve: &report.q_curve,
            steps: &report.steps,
            warnings: &report.warnings,
            timings: a.timings.then(|| Timings {
                load_seconds: (t1 - t0).as_secs_f64(),
                fit_seconds: (t2 - t1).as_secs_f64(),
            }),
        };
        let mut text = model::to_json_string(&file);
        text.push('\n');
        fs::write(path, text).map_err(io_err(path))?;
    }
    Ok(())
}

fn cmd_transform(a: &TransformArgs) -> Result<()> {
    check_input(&a.model)?;
    check_input(&a.input)?;
    if let Some(o) = &a.output {
        check_output(o)?;
    }
    let m = model::load(&a.model)?;
    let data = read_matrix(&a.input, a.header)?;
    let y = m.transform(data.values())?;
    let bytes = matrix_csv(&names("y", m.d()), y.view())?;
    write_output(a.output.as_deref(), &bytes)
}

fn cmd_reconstruct(a: &ReconstructArgs) -> Result<()> {
    check_input(&a.model)?;
    check_input(&a.input)?;
    if let Some(o) = &a.output {
        check_output(o)?;
    }
    let m = model::load(&a.model)?;
    let y = read_matrix(&a.input, a.header)?;
    let x = m.reconstruct(y.values())?;
    let bytes = matrix_csv(&names("x", m.p()), x.view())?;
    write_output(a.output.as_deref(), &bytes)
}

#[derive(Serialize)]
struct ReportRow {
    k: usize,
    q: f64,
    residual_variance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pca: Option<f64>,
}

#[derive(Serialize)]
struct ReportFile {
    total_variance: f64,
    rows: Vec<ReportRow>,
}

/// `%g`-style formatting with the given number of significant digits.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { format!("{v}") };
    }
    let exp = v.abs().log10().floor() as i32;
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if exp < -4 || exp >= digits as i32 {
        let s = format!("{:.*e}", digits - 1, v);
        let (mant, e) = s.split_once('e').expect("exponent present");
        format!("{}e{}", trim(mant.to_string()), e)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        // rounding can carry into a new digit, e.g. 9.999996 -> 10.00000
        let s = if s.trim_start_matches('-').split('.').next().map_or(0, str::len) > (exp + 1).max(1) as usize {
            format!("{:.*}", decimals.saturating_sub(1), v)
        } else {
            s
        };
        trim(s)
    }
}

fn cmd_report(a: &ReportArgs) -> Result<()> {
    check_input(&a.model)?;
    check_input(&a.data)?;
    if let Some(o) = &a.output {
        check_output(o)?;
    }
    let m = model::load(&a.model)?;
    let data = read_matrix(&a.data, a.header)?;
    if data.p() != m.p() {
        return Err(Error::Shape {
            expected: m.p(),
            got: data.p(),
        });
    }
    let variances = m.residual_variances(data.values())?;
    let total = total_variance(data.values());
    let pca = if a.compare_pca {
        Some(pca_oracle(&data, m.d())?.explained)
    } else {
        None
    };
    let rows: Vec<ReportRow> = variances
        .iter()
        .enumerate()
        .map(|(k, &v)| ReportRow {
            k,
            q: if k == 0 || total <= 0.0 { 0.0 } else { 1.0 - v / total },
            residual_variance: v,
            pca: pca.as_ref().map(|e| e[k]),
        })
        .collect();

    let text = if a.json {
        let mut s = model::to_json_string(&ReportFile {
            total_variance: total,
            rows,
        });
        s.push('\n');
        s
    } else {
        let mut s = String::new();
        if pca.is_some() {
            s.push_str(&format!("{:>3}  {:>12}  {:>12}  {:>12}\n", "k", "Q_k", "sigma2(R^k)", "PCA"));
        } else {
            s.push_str(&format!("{:>3}  {:>12}  {:>12}\n", "k", "Q_k", "sigma2(R^k)"));
        }
        for r in &rows {
            s.push_str(&format!(
                "{:>3}  {:>12}  {:>12}",
                r.k,
                format_sig(r.q, 6),
                format_sig(r.residual_variance, 6)
            ));
            if let Some(p) = r.pca {
                s.push_str(&format!("  {:>12}", format_sig(p, 6)));
            }
            s.push('\n');
        }
        s
    };
    write_output(a.output.as_deref(), text.as_bytes())
}

fn linspace(range: [f64; 2], count: usize) -> Vec<f64> {
    let [lo, hi] = range;
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (count - 1) as f64
            }
        })
        .collect()
}

/// Principal-value coordinates at which `manifold` samples the model.
pub fn manifold_grid(ranges: &[[f64; 2]], samples: usize) -> Result<Array2<f64>> {
    if samples < 2 {
        return Err(Error::Spec(format!("need at least 2 samples per axis, got {samples}")));
    }
    match ranges {
        [r1] => Ok(Array2::from_shape_vec((samples, 1), linspace(*r1, samples)).expect("shape matches")),
        [r1, r2] => {
            let (g1, g2) = (linspace(*r1, samples), linspace(*r2, samples));
            let mut grid = Array2::zeros((samples * samples, 2));
            for (i, u) in g1.iter().enumerate() {
                for (j, v) in g2.iter().enumerate() {
                    grid[[i * samples + j, 0]] = *u;
                    grid[[i * samples + j, 1]] = *v;
                }
            }
            Ok(grid)
        }
        _ => Err(Error::Unsupported(format!(
            "manifold sampling needs d = 1 or 2, model has d = {}; transform the data and plot pairs of principal variables instead",
            ranges.len()
        ))),
    }
}

fn cmd_manifold(a: &ManifoldArgs) -> Result<()> {
    check_input(&a.model)?;
    if let Some(o) = &a.output {
        check_output(o)?;
    }
    let m = model::load(&a.model)?;
    let mut ranges = m.y_ranges().to_vec();
    for (j, over) in [a.y1_range, a.y2_range].into_iter().enumerate() {
        if let (Some(r), Some(slot)) = (over, ranges.get_mut(j)) {
            *slot = r;
        }
    }
    let grid = manifold_grid(&ranges, a.samples)?;
    let x = m.reconstruct(grid.view())?;
    let mut out = Array2::zeros((grid.nrows(), grid.ncols() + x.ncols()));
    out.slice_mut(ndarray::s![.., ..grid.ncols()]).assign(&grid);
    out.slice_mut(ndarray::s![.., grid.ncols()..]).assign(&x);
    let mut header = names("y", grid.ncols());
    header.extend(names("x", m.p()));
    let bytes = matrix_csv(&header, out.view())?;
    write_output(a.output.as_deref(), &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(0.0, 6), "0");
        assert_eq!(format_sig(1.0, 6), "1");
        assert_eq!(format_sig(0.123456789, 6), "0.123457");
        assert_eq!(format_sig(123456.789, 6), "123457");
        assert_eq!(format_sig(1234567.0, 6), "1.23457e6");
        assert_eq!(format_sig(0.0000123456789, 6), "1.23457e-5");
        assert_eq!(format_sig(9.9999999, 6), "10");
        assert_eq!(format_sig(-2.5, 6), "-2.5");
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-1,2.5").unwrap(), [-1.0, 2.5]);
        assert!(parse_range("2,1").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn grid_shapes() {
        let g = manifold_grid(&[[0.0, 1.0]], 5).unwrap();
        assert_eq!(g.column(0).to_vec(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = manifold_grid(&[[0.0, 1.0], [2.0, 3.0]], 3).unwrap();
        assert_eq!(g.nrows(), 9);
        assert_eq!(g.row(1).to_vec(), vec![0.0, 2.5]);
        assert!(matches!(
            manifold_grid(&[[0.0, 1.0]; 3], 3),
            Err(Error::Unsupported(_))
        ));
        assert!(manifold_grid(&[[0.0, 1.0]], 1).is_err());
    }

    #[test]
    fn config_is_inserted_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.conf");
        fs::write(&cfg, "# defaults\nd = 2\nregressor=linear\nsymmetric = true\ntimings = false\n").unwrap();
        let args = apply_config(sv(&["autoassoc", "fit", "--config", cfg.to_str().unwrap(), "--d", "3"])).unwrap();
        assert_eq!(
            args,
            sv(&["autoassoc", "fit", "--d", "2", "--regressor", "linear", "--symmetric", "--d", "3"])
        );
        let cli = Cli::try_parse_from(args.iter().chain(["--input", "a", "--model", "b"].map(String::from).iter())).unwrap();
        match cli.command {
            Command::Fit(f) => {
                assert_eq!(f.d, 3);
                assert_eq!(f.regressor, RegressorName::Linear);
                assert!(f.symmetric);
            }
            _ => panic!("expected fit"),
        }
    }

    #[test]
    fn missing_config_is_usage_error() {
        assert_eq!(run(["autoassoc", "gen", "--kind", "circle", "--config", "/nonexistent/x.conf"]), 2);
    }

    #[test]
    fn bad_flags_exit_2() {
        assert_eq!(run(["autoassoc", "fit", "--bogus"]), 2);
        assert_eq!(run(["autoassoc"]), 2);
    }
}
