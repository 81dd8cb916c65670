//! Autoregressive models estimated with Burg's method.
//!
//! A fitted model predicts `y_t = c + Σ ψ_i · y_{t-i}`. Estimation runs on
//! the demeaned series and the intercept is recovered as
//! `c = mean · (1 - Σ ψ_i)`.

use crate::error::{check_finite, Error, Result};

/// Default upper bound for AIC order selection (four hours of 10-minute lags).
pub const DEFAULT_MAX_ORDER: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct ArModel {
    coefficients: Vec<f64>,
    intercept: f64,
    innovation_variance: f64,
    training_mean: f64,
    reflection: Vec<f64>,
}

impl ArModel {
    /// Builds a model from explicit parameters. The training mean is derived
    /// from the intercept when the lag polynomial allows it.
    pub fn new(coefficients: Vec<f64>, intercept: f64, innovation_variance: f64) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidParameter("AR order must be at least 1".into()));
        }
        check_finite(&coefficients)?;
        if !intercept.is_finite() || !(innovation_variance >= 0.0) {
            return Err(Error::InvalidParameter(
                "intercept must be finite and innovation variance non-negative".into(),
            ));
        }
        let gain = 1.0 - coefficients.iter().sum::<f64>();
        let training_mean = if gain.abs() > f64::EPSILON {
            intercept / gain
        } else {
            intercept
        };
        Ok(Self {
            coefficients,
            intercept,
            innovation_variance,
            training_mean,
            reflection: Vec::new(),
        })
    }

    /// Restores a model with every stored field given explicitly.
    pub(crate) fn from_stored(
        coefficients: Vec<f64>,
        intercept: f64,
        innovation_variance: f64,
        training_mean: f64,
        reflection: Vec<f64>,
    ) -> Result<Self> {
        let mut model = Self::new(coefficients, intercept, innovation_variance)?;
        model.training_mean = training_mean;
        model.reflection = reflection;
        Ok(model)
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn innovation_variance(&self) -> f64 {
        self.innovation_variance
    }

    pub fn training_mean(&self) -> f64 {
        self.training_mean
    }

    /// Reflection coefficients from the Burg recursion (empty for models
    /// built by hand).
    pub fn reflection_coefficients(&self) -> &[f64] {
        &self.reflection
    }

    /// True when every root of `1 - ψ_1 z - … - ψ_d z^d` lies outside the
    /// unit circle.
    ///
    /// Uses the step-down recursion: the polynomial is minimum phase iff
    /// all reflection coefficients it implies have magnitude below one.
    pub fn is_stationary(&self) -> bool {
        let mut a: Vec<f64> = self.coefficients.iter().map(|c| -c).collect();
        while let Some(&k) = a.last() {
            if !(k.abs() < 1.0) {
                return false;
            }
            let m = a.len();
            let denom = 1.0 - k * k;
            let reduced: Vec<f64> = (0..m - 1)
                .map(|i| (a[i] - k * a[m - 2 - i]) / denom)
                .collect();
            a = reduced;
        }
        true
    }

    /// One-step prediction from the most recent `order()` values
    /// (`recent` is in time order, newest last).
    fn predict_next(&self, recent: &[f64]) -> f64 {
        self.coefficients
            .iter()
            .zip(recent.iter().rev())
            .fold(self.intercept, |acc, (psi, y)| acc + psi * y)
    }
}

struct BurgPath {
    mean: f64,
    /// Prediction-error power after each order, starting with order 0.
    power: Vec<f64>,
    reflection: Vec<f64>,
    /// Prediction polynomial `1 + a_1 z^-1 + …` at each order.
    polys: Vec<Vec<f64>>,
}

fn burg_path(series: &[f64], max_order: usize) -> BurgPath {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let mut f: Vec<f64> = series.iter().map(|y| y - mean).collect();
    let mut b = f.clone();

    let mut power = vec![f.iter().map(|x| x * x).sum::<f64>() / n as f64];
    let mut reflection = Vec::with_capacity(max_order);
    let mut a = vec![1.0];
    let mut polys = Vec::with_capacity(max_order);

    for m in 1..=max_order {
        let (num, den) = (m..n).fold((0.0, 0.0), |(num, den), t| {
            (num + f[t] * b[t - 1], den + f[t] * f[t] + b[t - 1] * b[t - 1])
        });
        let k = if den > 0.0 { -2.0 * num / den } else { 0.0 };

        a.push(0.0);
        let prev = a.clone();
        for i in 1..=m {
            a[i] = prev[i] + k * prev[m - i];
        }

        // Descending so b[t-1] is still the previous order's value.
        for t in (m..n).rev() {
            let ft = f[t];
            f[t] = ft + k * b[t - 1];
            b[t] = b[t - 1] + k * ft;
        }

        let last = *power.last().unwrap();
        power.push(last * (1.0 - k * k));
        reflection.push(k);
        polys.push(a.clone());
    }

    BurgPath {
        mean,
        power,
        reflection,
        polys,
    }
}

fn check_series(series: &[f64], order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::InvalidParameter("AR order must be at least 1".into()));
    }
    if series.len() <= 2 * order {
        return Err(Error::InsufficientData(format!(
            "Burg fit of order {order} needs more than {} samples, got {}",
            2 * order,
            series.len()
        )));
    }
    check_finite(series)
}

fn model_from_path(path: &BurgPath, order: usize) -> ArModel {
    let coefficients: Vec<f64> = path.polys[order - 1][1..].iter().map(|a| -a).collect();
    let gain = 1.0 - coefficients.iter().sum::<f64>();
    ArModel {
        intercept: path.mean * gain,
        innovation_variance: path.power[order].max(0.0),
        training_mean: path.mean,
        reflection: path.reflection[..order].to_vec(),
        coefficients,
    }
}

/// Fits an AR(`order`) model with Burg's method.
///
/// A zero-variance series yields all-zero coefficients and `c = mean`.
pub fn fit_burg(series: &[f64], order: usize) -> Result<ArModel> {
    check_series(series, order)?;
    let path = burg_path(series, order);
    Ok(model_from_path(&path, order))
}

/// Akaike criterion used by [`select_order`]: `N·ln(σ²) + 2d`.
pub fn aic(n: usize, innovation_variance: f64, order: usize) -> f64 {
    n as f64 * innovation_variance.ln() + 2.0 * order as f64
}

/// Picks the order in `1..=max_order` minimizing AIC; ties go to the
/// smaller order.
pub fn select_order(series: &[f64], max_order: usize) -> Result<usize> {
    if max_order == 0 || 2 * max_order >= series.len() {
        return Err(Error::InvalidParameter(format!(
            "max_order must lie in 1..{} for a series of length {}",
            series.len().div_ceil(2),
            series.len()
        )));
    }
    check_finite(series)?;
    let path = burg_path(series, max_order);
    let n = series.len();
    let mut best = (1, f64::INFINITY);
    for d in 1..=max_order {
        // A zero-power fit scores -inf at every order, so order 1 wins.
        let score = aic(n, path.power[d].max(0.0), d);
        if score < best.1 {
            best = (d, score);
        }
    }
    Ok(best.0)
}

/// Selects an order by AIC and fits it.
pub fn fit_burg_auto(series: &[f64], max_order: usize) -> Result<ArModel> {
    let order = select_order(series, max_order)?;
    let path = burg_path(series, order);
    Ok(model_from_path(&path, order))
}

/// Recursive multi-step forecast: later steps consume earlier forecasts.
pub fn forecast_ar(model: &ArModel, history: &[f64], horizon: usize) -> Result<Vec<f64>> {
    let d = model.order();
    if history.len() < d {
        return Err(Error::InsufficientData(format!(
            "AR({d}) forecast needs at least {d} history values, got {}",
            history.len()
        )));
    }
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    check_finite(&history[history.len() - d..])?;

    let mut window = history[history.len() - d..].to_vec();
    let mut out = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let next = model.predict_next(&window[window.len() - d..]);
        out.push(next);
        window.push(next);
    }
    Ok(out)
}
