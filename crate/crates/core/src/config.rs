//! Run configuration shared by every CLI subcommand.
//!
//! A config file holds flat `key = value` lines; `#` starts a comment and
//! blank lines are ignored. Keys are the entries of [`KEYS`]. Command-line
//! flags of the same name override file values, and the `WINDCAST_SEED`
//! environment variable is consulted for the seed when neither sets it.
//!
//! ```text
//! # decomposition
//! filter = db4
//! levels = 9
//! split_level = 4
//! svr_c = 1.0
//! training_window = month
//! ```

use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::eval::{EvalConfig, TrainingWindow};
use crate::hybrid::{ArConfig, ArOrder, BandAssignment, HybridConfig, ModelKind, SvrConfig};
use crate::series::{GapPolicy, DEFAULT_INTERVAL_SECS};
use crate::svr::{KernelSpec, SvrHyperparams};
use crate::wavelet::{make_filter, Boundary, DecompositionSpec};

pub const SEED_ENV: &str = "WINDCAST_SEED";

/// Every recognised config key, in documentation order.
pub const KEYS: &[&str] = &[
    "filter",
    "levels",
    "boundary",
    "split_level",
    "smooth_model",
    "ar_order",
    "ar_max_order",
    "svr_kernel",
    "svr_c",
    "svr_epsilon",
    "svr_gamma",
    "svr_degree",
    "svr_coef0",
    "svr_tol",
    "svr_max_iter",
    "svr_lag",
    "horizon",
    "stride",
    "training_window",
    "history_window",
    "seed",
    "interval",
    "gap_policy",
    "refit",
];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub filter: String,
    /// 0 disables decomposition; the raw series is then modelled with
    /// `smooth_model`.
    pub levels: usize,
    pub boundary: Boundary,
    pub split_level: usize,
    pub smooth_model: ModelKind,
    /// Fixed AR order; `None` selects by AIC up to `ar_max_order`.
    pub ar_order: Option<usize>,
    pub ar_max_order: usize,
    pub svr_kernel: String,
    pub svr_c: f64,
    pub svr_epsilon: f64,
    /// `None` means `1 / svr_lag`.
    pub svr_gamma: Option<f64>,
    pub svr_degree: u32,
    pub svr_coef0: f64,
    pub svr_tol: f64,
    pub svr_max_iter: usize,
    pub svr_lag: usize,
    pub horizon: usize,
    pub stride: usize,
    pub training_window: TrainingWindow,
    pub history_window: usize,
    pub seed: u64,
    pub interval: i64,
    pub gap_policy: GapPolicy,
    pub refit: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let hybrid = HybridConfig::default();
        let eval = EvalConfig::default();
        let hp = SvrHyperparams::default();
        Self {
            filter: crate::wavelet::DEFAULT_FILTER.to_string(),
            levels: crate::wavelet::DEFAULT_LEVELS,
            boundary: Boundary::default(),
            split_level: hybrid.assignment.split_level(),
            smooth_model: hybrid.assignment.smooth_kind(),
            ar_order: None,
            ar_max_order: crate::ar::DEFAULT_MAX_ORDER,
            svr_kernel: "rbf".to_string(),
            svr_c: hp.c,
            svr_epsilon: hp.epsilon,
            svr_gamma: None,
            svr_degree: 3,
            svr_coef0: 1.0,
            svr_tol: hp.tol,
            svr_max_iter: hp.max_iter,
            svr_lag: hybrid.svr.lag,
            horizon: eval.horizon,
            stride: eval.stride,
            training_window: eval.training,
            history_window: hybrid.history_window,
            seed: 0,
            interval: DEFAULT_INTERVAL_SECS,
            gap_policy: GapPolicy::default(),
            refit: eval.refit,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_optional<T: FromStr>(key: &str, value: &str) -> Result<Option<T>> {
    if value.eq_ignore_ascii_case("auto") {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

impl RunConfig {
    /// Reads `key = value` pairs with their line numbers.
    pub fn parse_pairs(text: &str, origin: &str) -> Result<Vec<(usize, String, String)>> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "{origin}:{}: expected `key = value`",
                    i + 1
                )));
            };
            pairs.push((i + 1, k.trim().to_string(), v.trim().to_string()));
        }
        Ok(pairs)
    }

    /// Applies a config file on top of `self`.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<()> {
        for (line, k, v) in Self::parse_pairs(text, origin)? {
            self.set(&k, &v)
                .map_err(|e| Error::Config(format!("{origin}:{line}: {}", strip_prefix(e))))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text, &path.display().to_string())
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "filter" => {
                make_filter(value).map_err(|e| Error::Config(e.to_string()))?;
                self.filter = value.to_string();
            }
            "levels" => self.levels = parse(key, value)?,
            "boundary" => self.boundary = value.parse().map_err(|e: Error| Error::Config(e.to_string()))?,
            "split_level" => self.split_level = parse(key, value)?,
            "smooth_model" => self.smooth_model = value.parse().map_err(|e: Error| Error::Config(e.to_string()))?,
            "ar_order" => self.ar_order = parse_optional(key, value)?,
            "ar_max_order" => self.ar_max_order = parse(key, value)?,
            "svr_kernel" => {
                let kind = value.to_ascii_lowercase();
                if !matches!(kind.as_str(), "linear" | "rbf" | "polynomial") {
                    return Err(Error::Config(format!(
                        "unknown kernel `{value}` (expected linear, rbf or polynomial)"
                    )));
                }
                self.svr_kernel = kind;
            }
            "svr_c" => self.svr_c = parse(key, value)?,
            "svr_epsilon" => self.svr_epsilon = parse(key, value)?,
            "svr_gamma" => self.svr_gamma = parse_optional(key, value)?,
            "svr_degree" => self.svr_degree = parse(key, value)?,
            "svr_coef0" => self.svr_coef0 = parse(key, value)?,
            "svr_tol" => self.svr_tol = parse(key, value)?,
            "svr_max_iter" => self.svr_max_iter = parse(key, value)?,
            "svr_lag" => self.svr_lag = parse(key, value)?,
            "horizon" => self.horizon = parse(key, value)?,
            "stride" => self.stride = parse(key, value)?,
            "training_window" => {
                self.training_window = if value.eq_ignore_ascii_case("month") {
                    TrainingWindow::FirstMonth
                } else {
                    TrainingWindow::Samples(parse(key, value)?)
                }
            }
            "history_window" => self.history_window = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "interval" => self.interval = parse(key, value)?,
            "gap_policy" => self.gap_policy = value.parse().map_err(|e: Error| Error::Config(e.to_string()))?,
            "refit" => self.refit = parse(key, value)?,
            other => {
                return Err(Error::Config(format!(
                    "unknown key `{other}`; known keys: {}",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Textual value of `key`, in the form [`RunConfig::set`] accepts.
    pub fn get(&self, key: &str) -> Option<String> {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "auto".to_string());
        Some(match key {
            "filter" => self.filter.clone(),
            "levels" => self.levels.to_string(),
            "boundary" => self.boundary.to_string(),
            "split_level" => self.split_level.to_string(),
            "smooth_model" => self.smooth_model.to_string(),
            "ar_order" => opt(self.ar_order.map(|v| v.to_string())),
            "ar_max_order" => self.ar_max_order.to_string(),
            "svr_kernel" => self.svr_kernel.clone(),
            "svr_c" => self.svr_c.to_string(),
            "svr_epsilon" => self.svr_epsilon.to_string(),
            "svr_gamma" => opt(self.svr_gamma.map(|v| v.to_string())),
            "svr_degree" => self.svr_degree.to_string(),
            "svr_coef0" => self.svr_coef0.to_string(),
            "svr_tol" => self.svr_tol.to_string(),
            "svr_max_iter" => self.svr_max_iter.to_string(),
            "svr_lag" => self.svr_lag.to_string(),
            "horizon" => self.horizon.to_string(),
            "stride" => self.stride.to_string(),
            "training_window" => match self.training_window {
                TrainingWindow::FirstMonth => "month".to_string(),
                TrainingWindow::Samples(n) => n.to_string(),
            },
            "history_window" => self.history_window.to_string(),
            "seed" => self.seed.to_string(),
            "interval" => self.interval.to_string(),
            "gap_policy" => self.gap_policy.to_string(),
            "refit" => self.refit.to_string(),
            _ => return None,
        })
    }

    /// Every key with its current value, one `key = value` line each.
    pub fn to_text(&self) -> String {
        KEYS.iter()
            .map(|k| format!("{k} = {}\n", self.get(k).unwrap_or_default()))
            .collect()
    }

    /// Resolves the layered configuration: defaults, then `file`, then the
    /// seed environment variable if the file did not set a seed, then
    /// `flags` in order.
    pub fn resolve(file: Option<&Path>, env_seed: Option<&str>, flags: &[(String, String)]) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seed_set = false;
        if let Some(path) = file {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let origin = path.display().to_string();
            seed_set = Self::parse_pairs(&text, &origin)?.iter().any(|(_, k, _)| k == "seed");
            cfg.apply_text(&text, &origin)?;
        }
        if let (false, Some(s)) = (seed_set, env_seed) {
            cfg.set("seed", s)
                .map_err(|_| Error::Config(format!("{SEED_ENV}=`{s}` is not an unsigned integer")))?;
        }
        for (k, v) in flags {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn decomposition(&self) -> Result<Option<DecompositionSpec>> {
        if self.levels == 0 {
            return Ok(None);
        }
        DecompositionSpec::new(make_filter(&self.filter)?, self.levels, self.boundary).map(Some)
    }

    pub fn ar_config(&self) -> ArConfig {
        ArConfig {
            order: match self.ar_order {
                Some(d) => ArOrder::Fixed(d),
                None => ArOrder::Auto {
                    max_order: self.ar_max_order,
                },
            },
        }
    }

    pub fn kernel(&self) -> Result<KernelSpec> {
        let kernel = match self.svr_kernel.as_str() {
            "linear" => KernelSpec::Linear,
            "rbf" => match self.svr_gamma {
                Some(gamma) => KernelSpec::Rbf { gamma },
                None => KernelSpec::rbf_for_dim(self.svr_lag.max(1)),
            },
            "polynomial" => KernelSpec::Polynomial {
                degree: self.svr_degree,
                coef0: self.svr_coef0,
            },
            other => return Err(Error::Config(format!("unknown kernel `{other}`"))),
        };
        kernel.validate()?;
        Ok(kernel)
    }

    pub fn svr_config(&self) -> Result<SvrConfig> {
        let hyperparams = SvrHyperparams {
            c: self.svr_c,
            epsilon: self.svr_epsilon,
            tol: self.svr_tol,
            max_iter: self.svr_max_iter,
        };
        hyperparams.validate()?;
        if self.svr_lag == 0 {
            return Err(Error::InvalidParameter("svr_lag must be at least 1".into()));
        }
        Ok(SvrConfig {
            lag: self.svr_lag,
            kernel: Some(self.kernel()?),
            hyperparams,
        })
    }

    pub fn hybrid_config(&self) -> Result<HybridConfig> {
        Ok(HybridConfig {
            decomposition: self.decomposition()?,
            assignment: BandAssignment::new(self.split_level)?.with_smooth(self.smooth_model),
            ar: self.ar_config(),
            svr: self.svr_config()?,
            history_window: self.history_window,
        })
    }

    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            horizon: self.horizon,
            stride: self.stride,
            training: self.training_window,
            history_window: self.history_window,
            refit: self.refit,
        }
    }
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}
