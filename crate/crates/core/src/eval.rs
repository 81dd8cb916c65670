//! Rolling-origin evaluation of frozen forecasters.
//!
//! A recipe is fitted once on the training window. Forecast origins then
//! start at the end of that window and advance by `stride` samples; at each
//! origin the forecaster sees only the samples before the origin and its
//! `horizon`-step forecast is scored with RMSE against the actual values.

use std::fmt::Write as _;
use std::ops::Range;

use chrono::{DateTime, Datelike, TimeZone, Utc};
use rayon::prelude::*;

use crate::ar::{self, ArModel};
use crate::error::{Error, Result};
use crate::hybrid::{self, ArConfig, HybridConfig, HybridModel, SvrConfig};
use crate::series::{format_timestamp, TimeSeries};
use crate::svr::{self, SvrModel};

/// Six hours of 10-minute samples.
pub const DEFAULT_HORIZON: usize = 36;
/// One week of 10-minute samples.
pub const DEFAULT_STRIDE: usize = 1008;

/// Root mean squared error of a forecast.
pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch(format!(
            "{} actual values vs {} predictions",
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::InsufficientData("rmse of an empty forecast".into()));
    }
    crate::error::check_finite(actual)?;
    crate::error::check_finite(predicted)?;
    let sse: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(y, p)| (y - p) * (y - p))
        .sum();
    Ok((sse / actual.len() as f64).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrainingWindow {
    /// The calendar month containing the first sample.
    FirstMonth,
    /// The first `n` samples.
    Samples(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalConfig {
    pub horizon: usize,
    pub stride: usize,
    pub training: TrainingWindow,
    /// Trailing samples handed to the forecaster at each origin.
    pub history_window: usize,
    /// Refit on the `training`-sized window ending at each origin instead of
    /// freezing the first fit.
    pub refit: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            horizon: DEFAULT_HORIZON,
            stride: DEFAULT_STRIDE,
            training: TrainingWindow::FirstMonth,
            history_window: hybrid::DEFAULT_HISTORY_WINDOW,
            refit: false,
        }
    }
}

impl EvalConfig {
    fn validate(&self) -> Result<()> {
        if self.horizon == 0 || self.stride == 0 || self.history_window == 0 {
            return Err(Error::InvalidParameter(
                "horizon, stride and history window must all be at least 1".into(),
            ));
        }
        if self.training == TrainingWindow::Samples(0) {
            return Err(Error::InvalidParameter("training window is empty".into()));
        }
        Ok(())
    }

    /// Sample range used for fitting.
    pub fn training_range(&self, series: &TimeSeries) -> Range<usize> {
        let end = match self.training {
            TrainingWindow::Samples(n) => n,
            TrainingWindow::FirstMonth => {
                let start = series.start();
                let (y, m) = if start.month() == 12 {
                    (start.year() + 1, 1)
                } else {
                    (start.year(), start.month() + 1)
                };
                let next: DateTime<Utc> = Utc.with_ymd_and_hms(y, m, 1, 0, 0, 0).unwrap();
                series.index_at_or_after(next)
            }
        };
        0..end.min(series.len())
    }
}

/// What a forecaster is given at one origin.
#[derive(Clone, Copy, Debug)]
pub struct ForecastRequest<'a> {
    /// Samples strictly before the origin, newest last.
    pub history: &'a [f64],
    /// Index of the first forecast sample in the full series.
    pub origin: usize,
    pub horizon: usize,
}

pub trait Forecaster: Send + Sync {
    fn forecast(&self, request: &ForecastRequest<'_>) -> Result<Vec<f64>>;
}

/// A named way to build a forecaster from training data.
pub trait Recipe: Sync {
    fn name(&self) -> &str;
    fn fit(&self, training: &[f64]) -> Result<Box<dyn Forecaster>>;
}

impl Forecaster for HybridModel {
    fn forecast(&self, request: &ForecastRequest<'_>) -> Result<Vec<f64>> {
        hybrid::forecast_hybrid(self, request.history, request.horizon)
    }
}

impl Forecaster for ArModel {
    fn forecast(&self, request: &ForecastRequest<'_>) -> Result<Vec<f64>> {
        ar::forecast_ar(self, request.history, request.horizon)
    }
}

struct LaggedSvr {
    model: SvrModel,
    lag: usize,
}

impl Forecaster for LaggedSvr {
    fn forecast(&self, request: &ForecastRequest<'_>) -> Result<Vec<f64>> {
        svr::forecast_svr(&self.model, request.history, self.lag, request.horizon)
    }
}

/// Wavelet hybrid recipe.
pub struct HybridRecipe {
    pub label: String,
    pub config: HybridConfig,
}

impl Recipe for HybridRecipe {
    fn name(&self) -> &str {
        &self.label
    }

    fn fit(&self, training: &[f64]) -> Result<Box<dyn Forecaster>> {
        Ok(Box::new(hybrid::fit_hybrid(training, &self.config)?))
    }
}

/// AR on the undecomposed series.
pub struct ArRecipe {
    pub label: String,
    pub config: ArConfig,
}

impl Recipe for ArRecipe {
    fn name(&self) -> &str {
        &self.label
    }

    fn fit(&self, training: &[f64]) -> Result<Box<dyn Forecaster>> {
        Ok(Box::new(self.config.fit(training)?))
    }
}

/// SVR on the undecomposed series.
pub struct SvrRecipe {
    pub label: String,
    pub config: SvrConfig,
}

impl Recipe for SvrRecipe {
    fn name(&self) -> &str {
        &self.label
    }

    fn fit(&self, training: &[f64]) -> Result<Box<dyn Forecaster>> {
        Ok(Box::new(LaggedSvr {
            model: self.config.fit(training)?,
            lag: self.config.lag,
        }))
    }
}

/// Test double that looks up the true future from a copy of the series.
/// Its forecasts are perfect, so every RMSE it produces is zero.
pub struct PerfectRecipe {
    pub label: String,
    pub series: Vec<f64>,
}

struct Perfect(Vec<f64>);

impl Forecaster for Perfect {
    fn forecast(&self, request: &ForecastRequest<'_>) -> Result<Vec<f64>> {
        self.0
            .get(request.origin..request.origin + request.horizon)
            .map(<[f64]>::to_vec)
            .ok_or_else(|| Error::InsufficientData("origin beyond the stored series".into()))
    }
}

impl Recipe for PerfectRecipe {
    fn name(&self) -> &str {
        &self.label
    }

    fn fit(&self, _training: &[f64]) -> Result<Box<dyn Forecaster>> {
        Ok(Box::new(Perfect(self.series.clone())))
    }
}

/// Scores of one forecast origin. `rmse` is `None` when the origin was
/// skipped; `skip_reason` then says why.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRow {
    pub origin_index: usize,
    pub origin_time: DateTime<Utc>,
    pub horizon: usize,
    pub rmse: Option<f64>,
    pub skip_reason: Option<String>,
}

impl MetricsRow {
    pub fn is_skipped(&self) -> bool {
        self.rmse.is_none()
    }
}

/// Rows of one recipe plus the forecast at each scored origin.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub label: String,
    pub rows: Vec<MetricsRow>,
    /// Parallel to `rows`; empty for skipped origins.
    pub forecasts: Vec<Vec<f64>>,
}

/// Origins `train_end + i·stride` with a full horizon of data after them.
pub fn origins(series_len: usize, training: &Range<usize>, cfg: &EvalConfig) -> Vec<usize> {
    (0..)
        .map(|i| training.end + i * cfg.stride)
        .take_while(|o| o + cfg.horizon <= series_len)
        .collect()
}

fn history_range(series: &TimeSeries, origin: usize, window: usize) -> Range<usize> {
    let mut start = origin.saturating_sub(window);
    for r in series.missing() {
        if r.start < origin && r.end > start {
            start = start.max(r.end.min(origin));
        }
    }
    start..origin
}

/// Fits `recipe` once and scores it at every origin.
pub fn evaluate(series: &TimeSeries, recipe: &dyn Recipe, cfg: &EvalConfig) -> Result<Evaluation> {
    cfg.validate()?;
    let training = cfg.training_range(series);
    if training.is_empty() {
        return Err(Error::InsufficientData("training window holds no samples".into()));
    }
    if series.has_missing_in(training.clone()) {
        return Err(Error::InsufficientData(format!(
            "training window {training:?} contains missing samples"
        )));
    }
    let origins = origins(series.len(), &training, cfg);
    if origins.is_empty() {
        return Err(Error::InsufficientData(format!(
            "series of {} samples has no room for a {}-step forecast after the {}-sample training window",
            series.len(),
            cfg.horizon,
            training.len()
        )));
    }

    let values = series.values();
    let frozen = if cfg.refit {
        None
    } else {
        Some(recipe.fit(&values[training.clone()])?)
    };

    let results: Vec<(MetricsRow, Vec<f64>)> = origins
        .par_iter()
        .map(|&origin| -> Result<(MetricsRow, Vec<f64>)> {
            let mut row = MetricsRow {
                origin_index: origin,
                origin_time: series.timestamp(origin),
                horizon: cfg.horizon,
                rmse: None,
                skip_reason: None,
            };
            let future = origin..origin + cfg.horizon;
            if series.has_missing_in(future.clone()) {
                row.skip_reason = Some("missing actual values in horizon".into());
                return Ok((row, Vec::new()));
            }
            let hist = history_range(series, origin, cfg.history_window);
            let refitted;
            let forecaster: &dyn Forecaster = match &frozen {
                Some(f) => f.as_ref(),
                None => {
                    let fit_range = origin.saturating_sub(training.len())..origin;
                    if series.has_missing_in(fit_range.clone()) {
                        row.skip_reason = Some("missing samples in refit window".into());
                        return Ok((row, Vec::new()));
                    }
                    refitted = recipe.fit(&values[fit_range])?;
                    refitted.as_ref()
                }
            };
            let request = ForecastRequest {
                history: &values[hist.clone()],
                origin,
                horizon: cfg.horizon,
            };
            match forecaster.forecast(&request) {
                Ok(pred) => {
                    if pred.len() != cfg.horizon {
                        return Err(Error::LengthMismatch(format!(
                            "forecaster returned {} values for horizon {}",
                            pred.len(),
                            cfg.horizon
                        )));
                    }
                    row.rmse = Some(rmse(&values[future], &pred)?);
                    Ok((row, pred))
                }
                // Only a gap-shortened history is a reason to skip.
                Err(Error::InsufficientData(msg)) if hist.len() < cfg.history_window.min(origin) => {
                    row.skip_reason = Some(format!("history cut short by missing data: {msg}"));
                    Ok((row, Vec::new()))
                }
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;

    let (rows, forecasts) = results.into_iter().unzip();
    Ok(Evaluation {
        label: recipe.name().to_string(),
        rows,
        forecasts,
    })
}

/// Per-origin metrics of `recipe` under `cfg`.
pub fn rolling_evaluate(series: &TimeSeries, recipe: &dyn Recipe, cfg: &EvalConfig) -> Result<Vec<MetricsRow>> {
    Ok(evaluate(series, recipe, cfg)?.rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub label: String,
    pub mean_rmse: f64,
    /// Sample standard deviation over √n; zero for a single origin.
    pub standard_error: f64,
    pub n_origins: usize,
    pub n_skipped: usize,
}

pub fn summarize(label: &str, rows: &[MetricsRow]) -> Result<Summary> {
    let scores: Vec<f64> = rows.iter().filter_map(|r| r.rmse).collect();
    if scores.is_empty() {
        return Err(Error::InsufficientData("no scored origins to summarize".into()));
    }
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    let standard_error = if scores.len() > 1 {
        let var = scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(Summary {
        label: label.to_string(),
        mean_rmse: mean,
        standard_error,
        n_origins: scores.len(),
        n_skipped: rows.len() - scores.len(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub time: DateTime<Utc>,
    pub actual: f64,
    pub predicted: f64,
    pub model: String,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub evaluations: Vec<Evaluation>,
    pub summaries: Vec<Summary>,
    /// Step-by-step forecasts of every recipe at the traced origin.
    pub trace: Vec<TraceRow>,
}

/// Evaluates several recipes over identical origins. `trace_origin` picks
/// which origin (by position) is expanded into the forecast trace.
pub fn compare(
    series: &TimeSeries,
    recipes: &[&dyn Recipe],
    cfg: &EvalConfig,
    trace_origin: usize,
) -> Result<Comparison> {
    if recipes.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "comparison needs at least two recipes, got {}",
            recipes.len()
        )));
    }
    let evaluations: Vec<Evaluation> = recipes
        .iter()
        .map(|r| evaluate(series, *r, cfg))
        .collect::<Result<_>>()?;
    let summaries = evaluations
        .iter()
        .map(|e| summarize(&e.label, &e.rows))
        .collect::<Result<_>>()?;

    let mut trace = Vec::new();
    for e in &evaluations {
        let (Some(row), Some(pred)) = (e.rows.get(trace_origin), e.forecasts.get(trace_origin)) else {
            return Err(Error::InvalidParameter(format!(
                "trace origin {trace_origin} is beyond the {} evaluated origins",
                e.rows.len()
            )));
        };
        for (k, p) in pred.iter().enumerate() {
            let idx = row.origin_index + k;
            trace.push(TraceRow {
                time: series.timestamp(idx),
                actual: series.values()[idx],
                predicted: *p,
                model: e.label.clone(),
            });
        }
    }

    Ok(Comparison {
        evaluations,
        summaries,
        trace,
    })
}

/// `origin_time,origin_index,horizon,model,rmse`; skipped origins carry
/// `skipped` in the rmse column.
pub fn metrics_csv(evaluations: &[Evaluation]) -> String {
    let mut out = String::from("origin_time,origin_index,horizon,model,rmse\n");
    for e in evaluations {
        for r in &e.rows {
            let score = r.rmse.map_or_else(|| "skipped".to_string(), |v| v.to_string());
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                format_timestamp(r.origin_time),
                r.origin_index,
                r.horizon,
                e.label,
                score
            );
        }
    }
    out
}

/// `model,mean_rmse,standard_error,n_origins,n_skipped`
pub fn summary_csv(summaries: &[Summary]) -> String {
    let mut out = String::from("model,mean_rmse,standard_error,n_origins,n_skipped\n");
    for s in summaries {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.label, s.mean_rmse, s.standard_error, s.n_origins, s.n_skipped
        );
    }
    out
}

/// `time,actual,predicted,model`
pub fn trace_csv(trace: &[TraceRow]) -> String {
    let mut out = String::from("time,actual,predicted,model\n");
    for t in trace {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            format_timestamp(t.time),
            t.actual,
            t.predicted,
            t.model
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(rmse: f64) -> MetricsRow {
        MetricsRow {
            origin_index: 0,
            origin_time: crate::series::default_start(),
            horizon: 1,
            rmse: Some(rmse),
            skip_reason: None,
        }
    }

    #[test]
    fn rmse_examples() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        // squared errors (0, 0, 0, 4) → mean 1 → root 1
        assert!((rmse(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 6.0]).unwrap() - 1.0).abs() < 1e-12);
        // (9 + 16) / 2 = 12.5
        assert!((rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap() - 12.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rmse_errors() {
        assert!(rmse(&[], &[]).is_err());
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
        assert!(rmse(&[f64::NAN], &[1.0]).is_err());
    }

    #[test]
    fn summary_examples() {
        let s = summarize("m", &[row(1.0), row(1.0), row(1.0)]).unwrap();
        assert_eq!((s.mean_rmse, s.standard_error, s.n_origins), (1.0, 0.0, 3));
        let s = summarize("m", &[row(1.0), row(2.0), row(3.0)]).unwrap();
        assert!((s.mean_rmse - 2.0).abs() < 1e-15);
        assert!((s.standard_error - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        let s = summarize("m", &[row(2.0)]).unwrap();
        assert_eq!((s.mean_rmse, s.standard_error), (2.0, 0.0));
        assert!(summarize("m", &[]).is_err());
    }

    #[test]
    fn skipped_rows_are_counted_not_scored() {
        let mut skipped = row(0.0);
        skipped.rmse = None;
        let s = summarize("m", &[row(1.0), skipped, row(3.0)]).unwrap();
        assert_eq!((s.mean_rmse, s.n_origins, s.n_skipped), (2.0, 2, 1));
    }

    #[test]
    fn origin_layout() {
        let cfg = EvalConfig {
            horizon: 3,
            stride: 5,
            ..Default::default()
        };
        assert_eq!(origins(20, &(0..10), &cfg), vec![10, 15]);
        assert_eq!(origins(13, &(0..10), &cfg), vec![10]);
        assert!(origins(12, &(0..10), &cfg).is_empty());
    }

    #[test]
    fn first_month_window() {
        let ts = TimeSeries::from_values(vec![0.0; 31 * 144 + 500]).unwrap();
        assert_eq!(EvalConfig::default().training_range(&ts), 0..31 * 144);
    }

    #[test]
    fn history_starts_after_missing_data() {
        let mut ts = TimeSeries::from_values(vec![1.0; 100]).unwrap();
        ts.mark_missing(40..50).unwrap();
        assert_eq!(history_range(&ts, 80, 60), 50..80);
        assert_eq!(history_range(&ts, 80, 20), 60..80);
        assert_eq!(history_range(&ts, 30, 60), 0..30);
    }

    proptest! {
        #[test]
        fn rmse_properties(pairs in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..40), lambda in -10.0f64..10.0, seed in any::<u64>()) {
            let (y, p): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
            let r = rmse(&y, &p).unwrap();
            prop_assert!(r >= 0.0);
            prop_assert_eq!(rmse(&y, &y).unwrap(), 0.0);
            if y != p { prop_assert!(r > 0.0); }

            let ys: Vec<f64> = y.iter().map(|v| lambda * v).collect();
            let ps: Vec<f64> = p.iter().map(|v| lambda * v).collect();
            prop_assert!((rmse(&ys, &ps).unwrap() - lambda.abs() * r).abs() <= 1e-12 * (1.0 + lambda.abs() * r));

            let mut idx: Vec<usize> = (0..y.len()).collect();
            let mut s = seed;
            for i in (1..idx.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                idx.swap(i, (s >> 33) as usize % (i + 1));
            }
            let yp: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
            let pp: Vec<f64> = idx.iter().map(|&i| p[i]).collect();
            prop_assert!((rmse(&yp, &pp).unwrap() - r).abs() <= 1e-12 * (1.0 + r));
        }

        #[test]
        fn summary_is_order_independent(scores in proptest::collection::vec(0.0f64..10.0, 1..30)) {
            let rows: Vec<MetricsRow> = scores.iter().map(|&s| row(s)).collect();
            let mut rev = rows.clone();
            rev.reverse();
            let a = summarize("m", &rows).unwrap();
            let b = summarize("m", &rev).unwrap();
            prop_assert!((a.mean_rmse - b.mean_rmse).abs() < 1e-12);
            prop_assert!((a.standard_error - b.standard_error).abs() < 1e-12);
        }
    }
}
