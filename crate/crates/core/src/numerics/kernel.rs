use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Smoothing kernel family. Only the Gaussian density is provided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    #[default]
    Gaussian,
}

impl KernelKind {
    pub fn eval(self, u: f64) -> f64 {
        match self {
            KernelKind::Gaussian => INV_SQRT_2PI * (-0.5 * u * u).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    bandwidth: f64,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::Spec(format!("bandwidth must be positive and finite, got {bandwidth}")));
        }
        Ok(Self { kind, bandwidth })
    }

    pub fn gaussian(bandwidth: f64) -> Result<Self> {
        Self::new(KernelKind::Gaussian, bandwidth)
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// K((t − y)/h)
    pub fn weight(&self, t: f64, y: f64) -> f64 {
        self.kind.eval((t - y) / self.bandwidth)
    }
}

/// The kernel evaluated at an already-scaled argument u.
pub fn kernel_eval(spec: &KernelSpec, u: f64) -> f64 {
    spec.kind.eval(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_values() {
        let k = KernelSpec::gaussian(1.0).unwrap();
        assert!((kernel_eval(&k, 0.0) - 0.398_942_280_401_432_7).abs() < 1e-16);
        assert!((kernel_eval(&k, 0.0) - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-16);
        for u in [1e3, -1e3, f64::INFINITY] {
            assert_eq!(kernel_eval(&k, u), 0.0);
        }
        assert!(50.0 * kernel_eval(&k, 50.0) < 1e-300);
        for i in -40..=40 {
            let u = i as f64 * 0.137;
            assert_eq!(kernel_eval(&k, u), kernel_eval(&k, -u));
        }
    }

    #[test]
    fn integrates_to_one() {
        let k = KernelSpec::gaussian(1.0).unwrap();
        let h = 1e-3;
        let total: f64 = (-10_000..=10_000).map(|i| kernel_eval(&k, i as f64 * h) * h).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bandwidth_must_be_positive() {
        assert!(KernelSpec::gaussian(0.0).is_err());
        assert!(KernelSpec::gaussian(-1.0).is_err());
        assert!(KernelSpec::gaussian(f64::NAN).is_err());
    }
}
