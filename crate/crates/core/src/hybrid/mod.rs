//! Band-wise hybrid forecaster: AR on the fine detail bands, SVR on the
//! coarse bands and the smooth, summed back into one forecast.

mod format;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;

pub use format::{from_text, read_model, to_text, write_model};

use crate::ar::{self, ArModel};
use crate::error::{Error, Result};
use crate::svr::{self, KernelSpec, SvrHyperparams, SvrModel};
use crate::wavelet::{decompose, DecompositionSpec};

/// Default number of detail levels carried by AR.
pub const DEFAULT_SPLIT_LEVEL: usize = 4;
/// Default number of trailing samples decomposed at forecast time.
pub const DEFAULT_HISTORY_WINDOW: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Ar,
    Svr,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Ar => "ar",
            ModelKind::Svr => "svr",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ar" => Ok(ModelKind::Ar),
            "svr" | "svm" => Ok(ModelKind::Svr),
            other => Err(Error::InvalidParameter(format!(
                "unknown model kind `{other}` (expected ar or svr)"
            ))),
        }
    }
}

/// Which model family handles each component.
///
/// Detail levels `1..=split_level` use AR, deeper levels use SVR, and the
/// smooth uses `smooth` (SVR unless overridden).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BandAssignment {
    split_level: usize,
    smooth: ModelKind,
}

impl BandAssignment {
    pub fn new(split_level: usize) -> Result<Self> {
        if split_level == 0 {
            return Err(Error::InvalidParameter("split level must be at least 1".into()));
        }
        Ok(Self {
            split_level,
            smooth: ModelKind::Svr,
        })
    }

    pub fn with_smooth(mut self, kind: ModelKind) -> Self {
        self.smooth = kind;
        self
    }

    pub fn split_level(&self) -> usize {
        self.split_level
    }

    pub fn smooth_kind(&self) -> ModelKind {
        self.smooth
    }

    /// Model kind for detail `level` (1-based).
    pub fn detail_kind(&self, level: usize) -> ModelKind {
        if level <= self.split_level {
            ModelKind::Ar
        } else {
            ModelKind::Svr
        }
    }

    /// Kinds for every component of a `levels`-deep decomposition, smooth last.
    pub fn kinds(&self, levels: usize) -> Vec<ModelKind> {
        (1..=levels)
            .map(|j| self.detail_kind(j))
            .chain(std::iter::once(self.smooth))
            .collect()
    }

    fn check(&self, levels: usize) -> Result<()> {
        if self.split_level > levels {
            return Err(Error::InvalidParameter(format!(
                "split level {} exceeds the {levels} decomposition levels",
                self.split_level
            )));
        }
        Ok(())
    }
}

impl Default for BandAssignment {
    fn default() -> Self {
        Self {
            split_level: DEFAULT_SPLIT_LEVEL,
            smooth: ModelKind::Svr,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArOrder {
    Fixed(usize),
    /// AIC selection over `1..=max_order`.
    Auto { max_order: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArConfig {
    pub order: ArOrder,
}

impl Default for ArConfig {
    fn default() -> Self {
        Self {
            order: ArOrder::Auto {
                max_order: ar::DEFAULT_MAX_ORDER,
            },
        }
    }
}

impl ArConfig {
    pub fn fit(&self, series: &[f64]) -> Result<ArModel> {
        match self.order {
            ArOrder::Fixed(d) => ar::fit_burg(series, d),
            ArOrder::Auto { max_order } => ar::fit_burg_auto(series, max_order),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvrConfig {
    pub lag: usize,
    /// `None` selects an RBF kernel with `γ = 1/lag`.
    pub kernel: Option<KernelSpec>,
    pub hyperparams: SvrHyperparams,
}

impl Default for SvrConfig {
    fn default() -> Self {
        Self {
            lag: svr::DEFAULT_LAG,
            kernel: None,
            hyperparams: SvrHyperparams::default(),
        }
    }
}

impl SvrConfig {
    pub fn kernel(&self) -> KernelSpec {
        self.kernel.unwrap_or_else(|| KernelSpec::rbf_for_dim(self.lag))
    }

    pub fn fit(&self, series: &[f64]) -> Result<SvrModel> {
        let pairs = svr::embed(series, self.lag)?;
        svr::train_svr(&pairs, self.kernel(), &self.hyperparams)
    }
}

/// Everything needed to fit a [`HybridModel`].
#[derive(Clone, Debug, PartialEq)]
pub struct HybridConfig {
    /// `None` skips decomposition: the raw series is the only component and
    /// is modelled with the assignment's smooth kind.
    pub decomposition: Option<DecompositionSpec>,
    pub assignment: BandAssignment,
    pub ar: ArConfig,
    pub svr: SvrConfig,
    pub history_window: usize,
}

impl Default for HybridConfig {
    fn default() -> Self {
        Self {
            decomposition: Some(DecompositionSpec::default()),
            assignment: BandAssignment::default(),
            ar: ArConfig::default(),
            svr: SvrConfig::default(),
            history_window: DEFAULT_HISTORY_WINDOW,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ComponentModel {
    Ar(ArModel),
    Svr { model: SvrModel, lag: usize },
}

impl ComponentModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            ComponentModel::Ar(_) => ModelKind::Ar,
            ComponentModel::Svr { .. } => ModelKind::Svr,
        }
    }

    fn fit(kind: ModelKind, series: &[f64], ar_cfg: &ArConfig, svr_cfg: &SvrConfig) -> Result<Self> {
        Ok(match kind {
            ModelKind::Ar => ComponentModel::Ar(ar_cfg.fit(series)?),
            ModelKind::Svr => ComponentModel::Svr {
                model: svr_cfg.fit(series)?,
                lag: svr_cfg.lag,
            },
        })
    }

    pub fn forecast(&self, history: &[f64], horizon: usize) -> Result<Vec<f64>> {
        match self {
            ComponentModel::Ar(m) => ar::forecast_ar(m, history, horizon),
            ComponentModel::Svr { model, lag } => svr::forecast_svr(model, history, *lag, horizon),
        }
    }

    /// Past values the model reads per forecast.
    pub fn memory(&self) -> usize {
        match self {
            ComponentModel::Ar(m) => m.order(),
            ComponentModel::Svr { lag, .. } => *lag,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HybridModel {
    decomposition: Option<DecompositionSpec>,
    assignment: BandAssignment,
    components: Vec<ComponentModel>,
    training_window: Range<usize>,
    history_window: usize,
}

fn component_label(index: usize, levels: usize) -> String {
    if index < levels {
        format!("d{}", index + 1)
    } else {
        "smooth".to_string()
    }
}

impl HybridModel {
    /// Assembles a model from already fitted components, checking that the
    /// component count and kinds match the assignment.
    pub fn from_components(
        decomposition: Option<DecompositionSpec>,
        assignment: BandAssignment,
        components: Vec<ComponentModel>,
        training_window: Range<usize>,
        history_window: usize,
    ) -> Result<Self> {
        let levels = decomposition.as_ref().map_or(0, DecompositionSpec::levels);
        if levels > 0 {
            assignment.check(levels)?;
        }
        let expected = if levels > 0 {
            assignment.kinds(levels)
        } else {
            vec![assignment.smooth_kind()]
        };
        if components.len() != expected.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} component models, got {}",
                expected.len(),
                components.len()
            )));
        }
        for (i, (c, k)) in components.iter().zip(&expected).enumerate() {
            if c.kind() != *k {
                return Err(Error::InvalidParameter(format!(
                    "component {} is {} but the assignment calls for {}",
                    component_label(i, levels),
                    c.kind(),
                    k
                )));
            }
        }
        if history_window == 0 {
            return Err(Error::InvalidParameter("history window must be positive".into()));
        }
        Ok(Self {
            decomposition,
            assignment,
            components,
            training_window,
            history_window,
        })
    }

    pub fn decomposition(&self) -> Option<&DecompositionSpec> {
        self.decomposition.as_ref()
    }

    pub fn assignment(&self) -> &BandAssignment {
        &self.assignment
    }

    /// Component models in level order, smooth last.
    pub fn components(&self) -> &[ComponentModel] {
        &self.components
    }

    pub fn training_window(&self) -> Range<usize> {
        self.training_window.clone()
    }

    pub fn history_window(&self) -> usize {
        self.history_window
    }

    pub(crate) fn set_training_window(&mut self, window: Range<usize>) {
        self.training_window = window;
    }

    /// Shortest history [`forecast_hybrid`] accepts.
    pub fn min_history(&self) -> usize {
        let memory = self.components.iter().map(ComponentModel::memory).max().unwrap_or(1);
        let support = self
            .decomposition
            .as_ref()
            .map_or(1, DecompositionSpec::deepest_support);
        memory.max(support)
    }

    fn levels(&self) -> usize {
        self.decomposition.as_ref().map_or(0, DecompositionSpec::levels)
    }
}

/// Decomposes `series` and fits the assigned model to each component.
pub fn fit_hybrid(series: &[f64], config: &HybridConfig) -> Result<HybridModel> {
    let components: Vec<Vec<f64>> = match &config.decomposition {
        Some(spec) => {
            config.assignment.check(spec.levels())?;
            decompose(series, spec)?.into_components()
        }
        None => {
            crate::error::check_finite(series)?;
            vec![series.to_vec()]
        }
    };
    let levels = components.len() - 1;
    let kinds = if config.decomposition.is_some() {
        config.assignment.kinds(levels)
    } else {
        vec![config.assignment.smooth_kind()]
    };

    let fitted: Vec<ComponentModel> = components
        .par_iter()
        .zip(kinds.par_iter())
        .enumerate()
        .map(|(i, (series, &kind))| {
            ComponentModel::fit(kind, series, &config.ar, &config.svr)
                .map_err(|e| e.in_component(component_label(i, levels)))
        })
        .collect::<Result<_>>()?;

    HybridModel::from_components(
        config.decomposition.clone(),
        config.assignment,
        fitted,
        0..series.len(),
        config.history_window,
    )
}

/// Per-component forecasts, in level order with the smooth last.
pub fn forecast_components(model: &HybridModel, history: &[f64], horizon: usize) -> Result<Vec<Vec<f64>>> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    let window = &history[history.len().saturating_sub(model.history_window)..];
    if window.len() < model.min_history() {
        return Err(Error::InsufficientData(format!(
            "forecast needs at least {} history samples, got {}",
            model.min_history(),
            window.len()
        )));
    }
    let components = match &model.decomposition {
        Some(spec) => decompose(window, spec)?.into_components(),
        None => {
            crate::error::check_finite(window)?;
            vec![window.to_vec()]
        }
    };
    let levels = model.levels();
    model
        .components
        .iter()
        .zip(&components)
        .enumerate()
        .map(|(i, (m, series))| {
            m.forecast(series, horizon)
                .map_err(|e| e.in_component(component_label(i, levels)))
        })
        .collect()
}

/// Elementwise sum of per-component forecasts, accumulated in level order.
pub fn sum_components(parts: &[Vec<f64>]) -> Vec<f64> {
    let horizon = parts.first().map_or(0, Vec::len);
    (0..horizon)
        .map(|t| parts.iter().fold(0.0, |acc, p| acc + p[t]))
        .collect()
}

/// Forecasts `horizon` steps past the end of `history`.
///
/// Only the trailing `history_window` samples are decomposed.
pub fn forecast_hybrid(model: &HybridModel, history: &[f64], horizon: usize) -> Result<Vec<f64>> {
    Ok(sum_components(&forecast_components(model, history, horizon)?))
}

/// Single-model baseline fitted on the undecomposed series.
pub fn forecast_standalone(
    kind: ModelKind,
    series: &[f64],
    ar_cfg: &ArConfig,
    svr_cfg: &SvrConfig,
    horizon: usize,
) -> Result<Vec<f64>> {
    ComponentModel::fit(kind, series, ar_cfg, svr_cfg)?.forecast(series, horizon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{ar_process, sine_plus_ar};
    use crate::wavelet::{make_filter, Boundary};

    fn small_config(levels: usize, split: usize) -> HybridConfig {
        HybridConfig {
            decomposition: Some(
                DecompositionSpec::new(make_filter("db2").unwrap(), levels, Boundary::Reflect).unwrap(),
            ),
            assignment: BandAssignment::new(split).unwrap(),
            ar: ArConfig {
                order: ArOrder::Auto { max_order: 6 },
            },
            svr: SvrConfig {
                lag: 6,
                ..Default::default()
            },
            history_window: 512,
        }
    }

    #[test]
    fn nine_level_assignment() {
        let kinds = BandAssignment::new(4).unwrap().kinds(9);
        assert_eq!(kinds.len(), 10);
        assert!(kinds[..4].iter().all(|k| *k == ModelKind::Ar));
        assert!(kinds[4..].iter().all(|k| *k == ModelKind::Svr));
    }

    #[test]
    fn fit_assigns_models_per_band() {
        let y = sine_plus_ar(8.0, 2.0, 48.0, 0.6, 0.5, 600, 1);
        let m = fit_hybrid(&y, &small_config(2, 2)).unwrap();
        let kinds: Vec<_> = m.components().iter().map(ComponentModel::kind).collect();
        assert_eq!(kinds, vec![ModelKind::Ar, ModelKind::Ar, ModelKind::Svr]);
    }

    #[test]
    fn too_short_for_nine_levels() {
        let y = sine_plus_ar(8.0, 2.0, 48.0, 0.6, 0.5, 1000, 1);
        let err = fit_hybrid(&y, &HybridConfig::default()).unwrap_err();
        assert!(matches!(err, Error::SeriesTooShort { max_levels: 8, .. }), "{err}");
    }

    #[test]
    fn split_beyond_levels_rejected() {
        let y = sine_plus_ar(8.0, 2.0, 48.0, 0.6, 0.5, 600, 1);
        assert!(fit_hybrid(&y, &small_config(2, 3)).is_err());
        assert!(BandAssignment::new(0).is_err());
    }

    #[test]
    fn constant_components_sum() {
        let spec = DecompositionSpec::new(make_filter("db1").unwrap(), 2, Boundary::Reflect).unwrap();
        let comps = vec![
            ComponentModel::Ar(ArModel::new(vec![0.0], 1.0, 0.0).unwrap()),
            ComponentModel::Ar(ArModel::new(vec![0.0], 2.0, 0.0).unwrap()),
            ComponentModel::Svr {
                model: SvrModel::constant(3.0, 4),
                lag: 4,
            },
        ];
        let m = HybridModel::from_components(Some(spec), BandAssignment::new(2).unwrap(), comps, 0..0, 64).unwrap();
        let f = forecast_hybrid(&m, &[5.0; 40], 5).unwrap();
        assert_eq!(f, vec![6.0; 5]);
    }

    #[test]
    fn mismatched_components_rejected() {
        let spec = DecompositionSpec::new(make_filter("db1").unwrap(), 2, Boundary::Reflect).unwrap();
        let comps = vec![ComponentModel::Ar(ArModel::new(vec![0.0], 1.0, 0.0).unwrap()); 3];
        assert!(HybridModel::from_components(Some(spec), BandAssignment::new(2).unwrap(), comps, 0..0, 64).is_err());
    }

    #[test]
    fn forecast_is_sum_of_components_bitwise() {
        let y = sine_plus_ar(8.0, 2.0, 48.0, 0.6, 0.5, 700, 4);
        let m = fit_hybrid(&y[..600], &small_config(3, 2)).unwrap();
        let parts = forecast_components(&m, &y, 12).unwrap();
        assert_eq!(parts.len(), 4);
        let mut manual = vec![0.0; 12];
        for p in &parts {
            for (acc, v) in manual.iter_mut().zip(p) {
                *acc += v;
            }
        }
        let f = forecast_hybrid(&m, &y, 12).unwrap();
        assert_eq!(f.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), manual.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn prefix_stable_and_deterministic() {
        let y = sine_plus_ar(8.0, 2.0, 48.0, 0.6, 0.5, 700, 5);
        let cfg = small_config(3, 1);
        let m1 = fit_hybrid(&y[..600], &cfg).unwrap();
        let m2 = fit_hybrid(&y[..600], &cfg).unwrap();
        assert_eq!(m1, m2);
        let long = forecast_hybrid(&m1, &y, 24).unwrap();
        for k in [1, 5, 13, 24] {
            assert_eq!(forecast_hybrid(&m2, &y, k).unwrap(), long[..k]);
        }
    }

    #[test]
    fn no_decomposition_equals_standalone_ar() {
        let y = ar_process(&[0.75, -0.5], 1.0, 5.0, 3000, 42);
        let cfg = HybridConfig {
            decomposition: None,
            assignment: BandAssignment::new(1).unwrap().with_smooth(ModelKind::Ar),
            ..Default::default()
        };
        let m = fit_hybrid(&y, &cfg).unwrap();
        let hybrid = forecast_hybrid(&m, &y, 10).unwrap();
        let standalone = forecast_standalone(ModelKind::Ar, &y, &cfg.ar, &cfg.svr, 10).unwrap();
        assert_eq!(hybrid, standalone);
    }

    #[test]
    fn all_ar_bands_when_smooth_forced() {
        let y = sine_plus_ar(8.0, 2.0, 48.0, 0.6, 0.5, 600, 2);
        let mut cfg = small_config(3, 3);
        cfg.assignment = cfg.assignment.with_smooth(ModelKind::Ar);
        let m = fit_hybrid(&y, &cfg).unwrap();
        assert!(m.components().iter().all(|c| c.kind() == ModelKind::Ar));
    }

    #[test]
    fn standalone_baselines() {
        let flat = vec![4.0; 200];
        let f = forecast_standalone(ModelKind::Ar, &flat, &ArConfig::default(), &SvrConfig::default(), 5).unwrap();
        assert!(f.iter().all(|v| (v - 4.0).abs() < 1e-12), "{f:?}");
        let f = forecast_standalone(ModelKind::Svr, &flat, &ArConfig::default(), &SvrConfig::default(), 5).unwrap();
        assert!(f.iter().all(|v| (v - 4.0).abs() < 1e-12), "{f:?}");

        // Fixed-order AR baseline reproduces the hand recursion on its own fit.
        let y = ar_process(&[0.75, -0.5], 1.0, 0.0, 10_000, 42);
        let cfg = ArConfig { order: ArOrder::Fixed(2) };
        let m = cfg.fit(&y).unwrap();
        let (psi, c) = (m.coefficients(), m.intercept());
        let n = y.len();
        let s1 = c + psi[0] * y[n - 1] + psi[1] * y[n - 2];
        let s2 = c + psi[0] * s1 + psi[1] * y[n - 1];
        let f = forecast_standalone(ModelKind::Ar, &y, &cfg, &SvrConfig::default(), 2).unwrap();
        assert_eq!(f, vec![s1, s2]);
    }

    #[test]
    fn short_history_rejected() {
        let y = sine_plus_ar(8.0, 2.0, 48.0, 0.6, 0.5, 600, 2);
        let m = fit_hybrid(&y, &small_config(3, 2)).unwrap();
        assert!(matches!(forecast_hybrid(&m, &y[..10], 3), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn component_errors_name_the_band() {
        let y = sine_plus_ar(8.0, 2.0, 48.0, 0.6, 0.5, 100, 2);
        let mut cfg = small_config(2, 1);
        cfg.ar.order = ArOrder::Fixed(60);
        let err = fit_hybrid(&y, &cfg).unwrap_err();
        assert!(err.to_string().starts_with("component d1:"), "{err}");
    }
}
