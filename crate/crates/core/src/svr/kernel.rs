use std::fmt;

use crate::error::{Error, Result};

/// Kernel realizing the implicit feature map of the regression.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelSpec {
    /// `x·z`
    Linear,
    /// `exp(-γ·|x - z|²)`
    Rbf { gamma: f64 },
    /// `(x·z + coef0)^degree`
    Polynomial { degree: u32, coef0: f64 },
}

impl KernelSpec {
    /// RBF kernel with `γ = 1/dim`.
    pub fn rbf_for_dim(dim: usize) -> Self {
        KernelSpec::Rbf {
            gamma: 1.0 / dim.max(1) as f64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Rbf { gamma } if !(gamma > 0.0 && gamma.is_finite()) => Err(
                Error::InvalidParameter(format!("rbf gamma must be positive, got {gamma}")),
            ),
            KernelSpec::Polynomial { degree, coef0 } if degree == 0 || !coef0.is_finite() => {
                Err(Error::InvalidParameter(
                    "polynomial kernel needs degree >= 1 and a finite coef0".into(),
                ))
            }
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn eval(&self, x: &[f64], z: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot(x, z),
            KernelSpec::Rbf { gamma } => {
                let d2: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
                (-gamma * d2).exp()
            }
            KernelSpec::Polynomial { degree, coef0 } => (dot(x, z) + coef0).powi(degree as i32),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            KernelSpec::Linear => "linear",
            KernelSpec::Rbf { .. } => "rbf",
            KernelSpec::Polynomial { .. } => "polynomial",
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Linear => f.write_str("linear"),
            KernelSpec::Rbf { gamma } => write!(f, "rbf(gamma={gamma})"),
            KernelSpec::Polynomial { degree, coef0 } => {
                write!(f, "polynomial(degree={degree}, coef0={coef0})")
            }
        }
    }
}

#[inline]
fn dot(x: &[f64], z: &[f64]) -> f64 {
    x.iter().zip(z).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_values() {
        let x = [1.0, 2.0];
        let z = [3.0, -1.0];
        assert_eq!(KernelSpec::Linear.eval(&x, &z), 1.0);
        let rbf = KernelSpec::Rbf { gamma: 0.5 };
        assert!((rbf.eval(&x, &z) - (-0.5f64 * 13.0).exp()).abs() < 1e-15);
        assert_eq!(rbf.eval(&x, &x), 1.0);
        let poly = KernelSpec::Polynomial { degree: 2, coef0: 1.0 };
        assert_eq!(poly.eval(&x, &z), 4.0);
    }

    #[test]
    fn invalid_kernels() {
        assert!(KernelSpec::Rbf { gamma: 0.0 }.validate().is_err());
        assert!(KernelSpec::Rbf { gamma: -1.0 }.validate().is_err());
        assert!(KernelSpec::Polynomial { degree: 0, coef0: 0.0 }.validate().is_err());
        assert!(KernelSpec::rbf_for_dim(12).validate().is_ok());
    }
}
