//! Seeded dataset generators and a reference PCA.
//!
//! Randomness comes from SplitMix64 (Steele, Lea & Flood 2014): the state
//! advances by 0x9E3779B97F4A7C15 and each output is the state passed
//! through the fixed xor-shift-multiply finaliser below. Uniforms take the
//! top 53 bits; normals use the Box–Muller cosine branch with one fresh
//! pair of uniforms per draw. The stream is therefore easy to reproduce
//! bit-for-bit in any language with 64-bit wrapping arithmetic.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::data::{center, DataMatrix};
use crate::numerics::{covariance, sym_eigen};
use crate::{Error, Result};

/// SplitMix64 pseudo-random stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal.
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    /// (t, sin πt) for stratified t on [−1, 1].
    SShape,
    /// Unit circle at stratified angles.
    Circle,
    /// Gaussian data of the given rank; latent coordinate j has standard
    /// deviation 1/(j+1).
    LinearSubspace { rank: usize },
    /// Two isotropic Gaussian blobs centred at ±separation·e1.
    TwoClusters { separation: f64, spread: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    pub noise_sd: f64,
    pub seed: u64,
    pub ambient_p: usize,
}

impl GeneratorSpec {
    pub fn s_shape(n: usize, noise_sd: f64, seed: u64) -> Self {
        Self {
            kind: GeneratorKind::SShape,
            n,
            noise_sd,
            seed,
            ambient_p: 2,
        }
    }

    pub fn circle(n: usize, noise_sd: f64, seed: u64) -> Self {
        Self {
            kind: GeneratorKind::Circle,
            n,
            noise_sd,
            seed,
            ambient_p: 2,
        }
    }

    pub fn linear_subspace(n: usize, rank: usize, ambient_p: usize, noise_sd: f64, seed: u64) -> Self {
        Self {
            kind: GeneratorKind::LinearSubspace { rank },
            n,
            noise_sd,
            seed,
            ambient_p,
        }
    }

    pub fn two_clusters(n: usize, separation: f64, spread: f64, ambient_p: usize, seed: u64) -> Self {
        Self {
            kind: GeneratorKind::TwoClusters { separation, spread },
            n,
            noise_sd: 0.0,
            seed,
            ambient_p,
        }
    }

    pub fn with_ambient(mut self, p: usize) -> Self {
        self.ambient_p = p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.ambient_p;
        if self.n < 1 {
            return Err(Error::Spec("generator needs n >= 1".into()));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::Spec(format!("noise_sd must be non-negative, got {}", self.noise_sd)));
        }
        match self.kind {
            GeneratorKind::SShape | GeneratorKind::Circle if p < 2 => {
                Err(Error::Spec(format!("planar generators need ambient_p >= 2, got {p}")))
            }
            GeneratorKind::LinearSubspace { rank } if rank < 1 || rank > p => {
                Err(Error::Spec(format!("rank must be in 1..={p}, got {rank}")))
            }
            GeneratorKind::TwoClusters { separation, spread }
                if p < 1 || !(spread >= 0.0 && spread.is_finite() && separation.is_finite()) =>
            {
                Err(Error::Spec("two_clusters needs p >= 1, finite separation and spread >= 0".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Random orthonormal r-frame in R^p as a p×r matrix.
fn random_frame(rng: &mut SplitMix64, p: usize, r: usize) -> Array2<f64> {
    let mut cols: Vec<Array1<f64>> = Vec::with_capacity(r);
    while cols.len() < r {
        let mut v = Array1::from_shape_fn(p, |_| rng.normal());
        for _ in 0..2 {
            for u in &cols {
                let c = u.dot(&v);
                v.scaled_add(-c, u);
            }
        }
        let len = v.dot(&v).sqrt();
        if len > 1e-6 {
            cols.push(v / len);
        }
    }
    let mut out = Array2::zeros((p, r));
    for (j, c) in cols.iter().enumerate() {
        out.column_mut(j).assign(c);
    }
    out
}

/// Embedding of the plane: identity when p = 2, a seeded random frame otherwise.
fn planar_frame(rng: &mut SplitMix64, p: usize) -> Array2<f64> {
    if p == 2 {
        Array2::eye(2)
    } else {
        random_frame(rng, p, 2)
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<DataMatrix> {
    spec.validate()?;
    let (n, p) = (spec.n, spec.ambient_p);
    let mut rng = SplitMix64::new(spec.seed);
    let mut x = match spec.kind {
        GeneratorKind::SShape => {
            let frame = planar_frame(&mut rng, p);
            let latent = Array2::from_shape_fn((n, 2), |_| 0.0);
            let mut latent = latent;
            for i in 0..n {
                let t = -1.0 + 2.0 * (i as f64 + rng.uniform()) / n as f64;
                latent[[i, 0]] = t;
                latent[[i, 1]] = (PI * t).sin();
            }
            latent.dot(&frame.t())
        }
        GeneratorKind::Circle => {
            let frame = planar_frame(&mut rng, p);
            let mut latent = Array2::zeros((n, 2));
            for i in 0..n {
                let theta = 2.0 * PI * (i as f64 + rng.uniform()) / n as f64;
                latent[[i, 0]] = theta.cos();
                latent[[i, 1]] = theta.sin();
            }
            latent.dot(&frame.t())
        }
        GeneratorKind::LinearSubspace { rank } => {
            let frame = random_frame(&mut rng, p, rank);
            let latent = Array2::from_shape_fn((n, rank), |(_, j)| rng.normal() / (j + 1) as f64);
            latent.dot(&frame.t())
        }
        GeneratorKind::TwoClusters { separation, spread } => Array2::from_shape_fn((n, p), |(i, j)| {
            let centre = if j == 0 {
                if i % 2 == 0 {
                    separation
                } else {
                    -separation
                }
            } else {
                0.0
            };
            centre + spread * rng.normal()
        }),
    };
    if spec.noise_sd > 0.0 {
        x.mapv_inplace(|v| v + spec.noise_sd * rng.normal());
    }
    DataMatrix::new(x)
}

/// Classical PCA of a dataset.
#[derive(Debug, Clone)]
pub struct PcaOracle {
    /// Top-d eigenvectors of the covariance, sign-normalised.
    pub axes: Vec<Array1<f64>>,
    /// Cumulative explained-variance ratios 0, λ₁/Σλ, …, (λ₁+…+λ_d)/Σλ.
    pub explained: Vec<f64>,
    /// Full covariance spectrum, descending.
    pub eigenvalues: Vec<f64>,
}

/// Centres the data, forms the covariance with 1/n normalisation and
/// returns its leading eigenvectors and cumulative explained variance.
pub fn pca_oracle(data: &DataMatrix, d: usize) -> Result<PcaOracle> {
    if d > data.p() {
        return Err(Error::Spec(format!("d = {d} exceeds p = {}", data.p())));
    }
    let centered = center(data);
    let cov = covariance(centered.centered.view());
    let eig = sym_eigen(cov.view())?;
    let eigenvalues: Vec<f64> = eig.values.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = eigenvalues.iter().sum();
    let mut explained = Vec::with_capacity(d + 1);
    let mut acc = 0.0;
    explained.push(0.0);
    for &lambda in eigenvalues.iter().take(d) {
        acc += lambda;
        explained.push(if total > 0.0 { acc / total } else { 0.0 });
    }
    Ok(PcaOracle {
        axes: (0..d).map(|j| eig.vectors.column(j).to_owned()).collect(),
        explained,
        eigenvalues,
    })
}
