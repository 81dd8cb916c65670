//! Independent reference implementations used by the integration tests.

#![allow(dead_code)]

use std::sync::{Arc, Mutex};

use windcast::eval::{ForecastRequest, Forecaster, Recipe};

/// Zero mean, unit population spread per column; a constant column keeps
/// spread 1.
pub fn standardize(columns: &[Vec<f64>]) -> Vec<Vec<f64>> {
    columns
        .iter()
        .map(|col| {
            let n = col.len() as f64;
            let mean = col.iter().sum::<f64>() / n;
            let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
            let sd = if sd > 1e-12 * mean.abs().max(1.0) { sd } else { 1.0 };
            col.iter().map(|v| (v - mean) / sd).collect()
        })
        .collect()
}

/// Standardizes lag vectors coordinate-wise.
pub fn standardize_rows(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dim = rows[0].len();
    let cols: Vec<Vec<f64>> = (0..dim).map(|k| rows.iter().map(|r| r[k]).collect()).collect();
    let cols = standardize(&cols);
    (0..rows.len()).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

/// ε-SVR dual optimum by accelerated projected gradient ascent over
/// `[α; α*] ∈ [0, C]^2l` with `Σα = Σα*`.
///
/// `W = -½ βᵀKβ - ε Σ(α + α*) + zᵀβ`, `β = α - α*`.
pub fn dual_optimum(gram: &[Vec<f64>], z: &[f64], c: f64, eps: f64) -> f64 {
    let l = z.len();
    let trace: f64 = (0..l).map(|i| gram[i][i]).sum();
    let step = 1.0 / (2.0 * trace + 1e-12);
    let sign = |t: usize| if t < l { 1.0 } else { -1.0 };

    let beta_of = |x: &[f64]| -> Vec<f64> { (0..l).map(|i| x[i] - x[i + l]).collect() };
    let objective = |x: &[f64]| -> f64 {
        let b = beta_of(x);
        let quad: f64 = (0..l)
            .map(|i| (0..l).map(|j| b[i] * gram[i][j] * b[j]).sum::<f64>())
            .sum();
        -0.5 * quad - eps * x.iter().sum::<f64>() + z.iter().zip(&b).map(|(zi, bi)| zi * bi).sum::<f64>()
    };
    let gradient = |x: &[f64]| -> Vec<f64> {
        let b = beta_of(x);
        let kb: Vec<f64> = (0..l).map(|i| (0..l).map(|j| gram[i][j] * b[j]).sum()).collect();
        (0..2 * l)
            .map(|t| {
                let i = t % l;
                sign(t) * (z[i] - kb[i]) - eps
            })
            .collect()
    };
    // Projection onto the box intersected with the hyperplane, by bisection
    // on the multiplier of the equality constraint.
    let project = |y: &[f64]| -> Vec<f64> {
        let at = |lambda: f64| -> Vec<f64> {
            (0..2 * l)
                .map(|t| (y[t] - lambda * sign(t)).clamp(0.0, c))
                .collect()
        };
        let balance = |x: &[f64]| -> f64 { (0..2 * l).map(|t| sign(t) * x[t]).sum() };
        let bound = y.iter().fold(0.0f64, |m, v| m.max(v.abs())) + c + 1.0;
        let (mut lo, mut hi) = (-bound, bound);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if balance(&at(mid)) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        at(0.5 * (lo + hi))
    };

    let mut x = vec![0.0; 2 * l];
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut best = objective(&x);
    for _ in 0..50_000 {
        let g = gradient(&y);
        let next = project(&y.iter().zip(&g).map(|(yi, gi)| yi + step * gi).collect::<Vec<_>>());
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        y = next
            .iter()
            .zip(&x)
            .map(|(n, o)| n + (t - 1.0) / t_next * (n - o))
            .collect();
        x = next;
        t = t_next;
        best = best.max(objective(&x));
    }
    best
}

pub fn linear(x: &[f64], z: &[f64]) -> f64 {
    x.iter().zip(z).map(|(a, b)| a * b).sum()
}

pub fn rbf(gamma: f64) -> impl Fn(&[f64], &[f64]) -> f64 {
    move |x, z| (-gamma * x.iter().zip(z).map(|(a, b)| (a - b).powi(2)).sum::<f64>()).exp()
}

pub fn gram(rows: &[Vec<f64>], k: impl Fn(&[f64], &[f64]) -> f64) -> Vec<Vec<f64>> {
    rows.iter().map(|a| rows.iter().map(|b| k(a, b)).collect()).collect()
}

/// Forecaster double that records what it was shown. Used on a series whose
/// value equals its index, so the newest visible sample identifies exactly
/// how far the history reached.
pub struct Recorder {
    pub label: String,
    pub seen: Arc<Mutex<Vec<Seen>>>,
}

#[derive(Clone, Debug)]
pub struct Seen {
    pub origin: usize,
    pub first: usize,
    pub last: usize,
    pub len: usize,
}

impl Recorder {
    pub fn new(label: &str) -> Self {
        Self {
            label: label.to_string(),
            seen: Arc::default(),
        }
    }

    pub fn seen(&self) -> Vec<Seen> {
        let mut v = self.seen.lock().unwrap().clone();
        v.sort_by_key(|s| s.origin);
        v
    }
}

struct RecorderForecaster(Arc<Mutex<Vec<Seen>>>);

impl Forecaster for RecorderForecaster {
    fn forecast(&self, request: &ForecastRequest<'_>) -> windcast::Result<Vec<f64>> {
        let h = request.history;
        self.0.lock().unwrap().push(Seen {
            origin: request.origin,
            first: h.first().map_or(usize::MAX, |v| *v as usize),
            last: h.last().map_or(usize::MAX, |v| *v as usize),
            len: h.len(),
        });
        Ok(vec![0.0; request.horizon])
    }
}

impl Recipe for Recorder {
    fn name(&self) -> &str {
        &self.label
    }

    fn fit(&self, _training: &[f64]) -> windcast::Result<Box<dyn Forecaster>> {
        Ok(Box::new(RecorderForecaster(Arc::clone(&self.seen))))
    }
}
