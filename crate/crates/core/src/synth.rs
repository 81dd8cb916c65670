//! Seeded synthetic signals standing in for the stochastic, chaotic and
//! deterministic parts of a wind record.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

const BURN_IN: usize = 500;

#[derive(Clone, Debug, PartialEq)]
pub enum SynthKind {
    Constant {
        value: f64,
    },
    /// `y_t = mean + x_t` with `x_t = Σ φ_i x_{t-i} + σ·ε_t`.
    Ar {
        coefficients: Vec<f64>,
        sigma: f64,
        mean: f64,
    },
    /// `offset + amplitude·sin(2πt/period)` plus AR(1) noise.
    SinePlusAr {
        offset: f64,
        amplitude: f64,
        period: f64,
        phi: f64,
        sigma: f64,
    },
    /// Mackey-Glass delay equation sampled once per time unit:
    /// `dx/dt = β·x(t-τ) / (1 + x(t-τ)^n) - γ·x(t)`, rescaled by
    /// `offset + scale·x`.
    MackeyGlass {
        delay: usize,
        beta: f64,
        gamma: f64,
        exponent: f64,
        substeps: usize,
        scale: f64,
        offset: f64,
    },
}

impl SynthKind {
    pub fn constant(value: f64) -> Self {
        SynthKind::Constant { value }
    }

    /// Standard chaotic regime: τ = 17, β = 0.2, γ = 0.1, n = 10.
    pub fn mackey_glass() -> Self {
        SynthKind::MackeyGlass {
            delay: 17,
            beta: 0.2,
            gamma: 0.1,
            exponent: 10.0,
            substeps: 10,
            scale: 1.0,
            offset: 0.0,
        }
    }

    /// Daily cycle (288 ten-minute samples) on top of AR(1) noise.
    pub fn daily_cycle() -> Self {
        SynthKind::SinePlusAr {
            offset: 8.0,
            amplitude: 3.0,
            period: 288.0,
            phi: 0.6,
            sigma: 0.5,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SynthKind::Constant { .. } => "constant",
            SynthKind::Ar { .. } => "ar",
            SynthKind::SinePlusAr { .. } => "sine_plus_ar",
            SynthKind::MackeyGlass { .. } => "mackey_glass",
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("{}: {msg}", self.name())));
        match self {
            SynthKind::Constant { value } if !value.is_finite() => bad("value must be finite"),
            SynthKind::Ar {
                coefficients,
                sigma,
                mean,
            } => {
                if coefficients.is_empty() {
                    bad("needs at least one coefficient")
                } else if !(*sigma >= 0.0) || !mean.is_finite() {
                    bad("sigma must be non-negative and mean finite")
                } else if coefficients.iter().any(|c| !c.is_finite()) {
                    bad("coefficients must be finite")
                } else {
                    Ok(())
                }
            }
            SynthKind::SinePlusAr {
                offset,
                amplitude,
                period,
                phi,
                sigma,
            } => {
                if !(*period > 0.0) || !(*sigma >= 0.0) || !(phi.abs() < 1.0) {
                    bad("needs period > 0, sigma >= 0 and |phi| < 1")
                } else if !offset.is_finite() || !amplitude.is_finite() {
                    bad("offset and amplitude must be finite")
                } else {
                    Ok(())
                }
            }
            SynthKind::MackeyGlass {
                delay,
                beta,
                gamma,
                exponent,
                substeps,
                scale,
                offset,
            } => {
                if *delay == 0 || *substeps == 0 {
                    bad("delay and substeps must be positive")
                } else if !(*beta > 0.0) || !(*gamma > 0.0) || !(*exponent > 0.0) {
                    bad("beta, gamma and exponent must be positive")
                } else if !scale.is_finite() || !offset.is_finite() {
                    bad("scale and offset must be finite")
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// Generates `n` samples of `kind` as a 10-minute series starting 2004-01-01.
pub fn synth_generate(kind: &SynthKind, n: usize, seed: u64) -> Result<TimeSeries> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    kind.validate()?;
    let values = match kind {
        SynthKind::Constant { value } => vec![*value; n],
        SynthKind::Ar {
            coefficients,
            sigma,
            mean,
        } => ar_process(coefficients, *sigma, *mean, n, seed),
        SynthKind::SinePlusAr {
            offset,
            amplitude,
            period,
            phi,
            sigma,
        } => sine_plus_ar(*offset, *amplitude, *period, *phi, *sigma, n, seed),
        SynthKind::MackeyGlass {
            delay,
            beta,
            gamma,
            exponent,
            substeps,
            scale,
            offset,
        } => mackey_glass(*delay, *beta, *gamma, *exponent, *substeps, n, seed)
            .into_iter()
            .map(|x| offset + scale * x)
            .collect(),
    };
    TimeSeries::from_values(values)
}

pub fn white_noise(n: usize, sigma: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("sigma is finite and non-negative");
    (0..n).map(|_| normal.sample(&mut rng)).collect()
}

/// AR process with Gaussian innovations, started from zero and burnt in.
pub fn ar_process(coefficients: &[f64], sigma: f64, mean: f64, n: usize, seed: u64) -> Vec<f64> {
    let d = coefficients.len();
    let noise = white_noise(n + BURN_IN, sigma, seed);
    let mut x = vec![0.0; d];
    x.reserve(n + BURN_IN);
    for e in noise {
        let t = x.len();
        let next = coefficients
            .iter()
            .enumerate()
            .fold(e, |acc, (i, c)| acc + c * x[t - 1 - i]);
        x.push(next);
    }
    x[d + BURN_IN..].iter().map(|v| v + mean).collect()
}

pub fn sine_plus_ar(
    offset: f64,
    amplitude: f64,
    period: f64,
    phi: f64,
    sigma: f64,
    n: usize,
    seed: u64,
) -> Vec<f64> {
    let noise = ar_process(&[phi], sigma, 0.0, n, seed);
    noise
        .iter()
        .enumerate()
        .map(|(t, e)| offset + amplitude * (std::f64::consts::TAU * t as f64 / period).sin() + e)
        .collect()
}

/// Integrates the Mackey-Glass equation with RK4 on a grid of
/// `1/substeps` time units and returns one sample per time unit.
pub fn mackey_glass(
    delay: usize,
    beta: f64,
    gamma: f64,
    exponent: f64,
    substeps: usize,
    n: usize,
    seed: u64,
) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1.0 / substeps as f64;
    let lag = delay * substeps;
    let feedback = |x: f64| beta * x / (1.0 + x.powf(exponent));

    // Constant initial history perturbed by the seed.
    let mut x: Vec<f64> = (0..=lag).map(|_| 1.2 + rng.random_range(-0.05..0.05)).collect();
    let total = (n + BURN_IN) * substeps;
    x.reserve(total);
    for _ in 0..total {
        let i = x.len() - 1;
        let (d0, d1) = (x[i - lag], x[i + 1 - lag]);
        let dmid = 0.5 * (d0 + d1);
        let xi = x[i];
        let k1 = feedback(d0) - gamma * xi;
        let k2 = feedback(dmid) - gamma * (xi + 0.5 * h * k1);
        let k3 = feedback(dmid) - gamma * (xi + 0.5 * h * k2);
        let k4 = feedback(d1) - gamma * (xi + h * k3);
        x.push(xi + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    x[lag + 1..]
        .iter()
        .step_by(substeps)
        .skip(BURN_IN)
        .take(n)
        .copied()
        .collect()
}
