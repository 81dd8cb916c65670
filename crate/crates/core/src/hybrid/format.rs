//! Text serialization of [`HybridModel`].
//!
//! The file is a list of `key = value` lines; `#` starts a comment. Arrays
//! are space separated and every float is written with 17 significant
//! digits, so a write/read cycle restores each parameter bit for bit.
//!
//! ```text
//! format = windcast-hybrid
//! version = 1
//! decomposition = wavelet        # or `none`
//! filter = db4
//! levels = 9
//! boundary = reflect
//! split_level = 4
//! smooth_model = svr
//! history_window = 2048
//! training_start = 0
//! training_end = 4464
//! components = 10
//! component.0.kind = ar
//! component.0.coefficients = ...
//! component.9.kind = svr
//! component.9.support_vectors = ...   # row-major, support_count × lag
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::{BandAssignment, ComponentModel, HybridModel, ModelKind};
use crate::ar::ArModel;
use crate::error::{Error, Result};
use crate::svr::{KernelSpec, Scaling, SvrHyperparams, SvrModel};
use crate::wavelet::{make_filter, Boundary, DecompositionSpec};

const FORMAT_NAME: &str = "windcast-hybrid";
const FORMAT_VERSION: u32 = 1;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn nums(values: &[f64]) -> String {
    values.iter().map(|v| num(*v)).collect::<Vec<_>>().join(" ")
}

/// Renders `model` in the text format.
pub fn to_text(model: &HybridModel) -> String {
    let mut out = String::new();
    let mut kv = |key: &str, value: &dyn std::fmt::Display| {
        let _ = writeln!(out, "{key} = {value}");
    };
    kv("format", &FORMAT_NAME);
    kv("version", &FORMAT_VERSION);
    match &model.decomposition {
        Some(spec) => {
            kv("decomposition", &"wavelet");
            kv("filter", &spec.filter().name());
            kv("levels", &spec.levels());
            kv("boundary", &spec.boundary());
        }
        None => kv("decomposition", &"none"),
    }
    kv("split_level", &model.assignment.split_level());
    kv("smooth_model", &model.assignment.smooth_kind());
    kv("history_window", &model.history_window);
    kv("training_start", &model.training_window.start);
    kv("training_end", &model.training_window.end);
    kv("components", &model.components.len());

    for (i, c) in model.components.iter().enumerate() {
        let key = |name: &str| format!("component.{i}.{name}");
        match c {
            ComponentModel::Ar(m) => {
                kv(&key("kind"), &"ar");
                kv(&key("order"), &m.order());
                kv(&key("coefficients"), &nums(m.coefficients()));
                kv(&key("intercept"), &num(m.intercept()));
                kv(&key("innovation_variance"), &num(m.innovation_variance()));
                kv(&key("training_mean"), &num(m.training_mean()));
                kv(&key("reflection"), &nums(m.reflection_coefficients()));
            }
            ComponentModel::Svr { model: m, lag } => {
                kv(&key("kind"), &"svr");
                kv(&key("lag"), lag);
                match m.kernel() {
                    KernelSpec::Linear => kv(&key("kernel"), &"linear"),
                    KernelSpec::Rbf { gamma } => {
                        kv(&key("kernel"), &"rbf");
                        kv(&key("gamma"), &num(gamma));
                    }
                    KernelSpec::Polynomial { degree, coef0 } => {
                        kv(&key("kernel"), &"polynomial");
                        kv(&key("degree"), &degree);
                        kv(&key("coef0"), &num(coef0));
                    }
                }
                let hp = m.hyperparams();
                kv(&key("c"), &num(hp.c));
                kv(&key("epsilon"), &num(hp.epsilon));
                kv(&key("tol"), &num(hp.tol));
                kv(&key("max_iter"), &hp.max_iter);
                kv(&key("converged"), &m.converged());
                kv(&key("dual_objective"), &num(m.dual_objective()));
                let s = m.scaling();
                kv(&key("input_mean"), &nums(&s.input_mean));
                kv(&key("input_scale"), &nums(&s.input_scale));
                kv(&key("target_mean"), &num(s.target_mean));
                kv(&key("target_scale"), &num(s.target_scale));
                kv(&key("bias"), &num(m.bias()));
                kv(&key("support_count"), &m.dual_coefficients().len());
                let idx: Vec<String> = m.support_indices().iter().map(usize::to_string).collect();
                kv(&key("support_indices"), &idx.join(" "));
                kv(&key("dual_coefficients"), &nums(m.dual_coefficients()));
                let flat: Vec<f64> = m.support_vectors().iter().flatten().copied().collect();
                kv(&key("support_vectors"), &nums(&flat));
            }
        }
    }
    out
}

struct Fields {
    map: BTreeMap<String, (usize, String)>,
}

impl Fields {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::ModelFormat(format!("line {}: expected `key = value`", n + 1)))?;
            let k = k.trim().to_string();
            if map.insert(k.clone(), (n + 1, v.trim().to_string())).is_some() {
                return Err(Error::ModelFormat(format!("line {}: duplicate key `{k}`", n + 1)));
            }
        }
        Ok(Self { map })
    }

    fn raw(&self, key: &str) -> Result<&(usize, String)> {
        self.map
            .get(key)
            .ok_or_else(|| Error::ModelFormat(format!("missing key `{key}`")))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let (line, v) = self.raw(key)?;
        v.parse()
            .map_err(|_| Error::ModelFormat(format!("line {line}: bad value for `{key}`: `{v}`")))
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        let (line, v) = self.raw(key)?;
        v.split_whitespace()
            .map(|tok| {
                tok.parse()
                    .map_err(|_| Error::ModelFormat(format!("line {line}: bad entry `{tok}` in `{key}`")))
            })
            .collect()
    }
}

/// Parses the text format.
pub fn from_text(text: &str) -> Result<HybridModel> {
    let f = Fields::parse(text)?;
    let name: String = f.get("format")?;
    if name != FORMAT_NAME {
        return Err(Error::ModelFormat(format!("unknown format `{name}`")));
    }
    let version: u32 = f.get("version")?;
    if version != FORMAT_VERSION {
        return Err(Error::ModelFormat(format!("unsupported version {version}")));
    }

    let decomposition = match f.get::<String>("decomposition")?.as_str() {
        "wavelet" => Some(DecompositionSpec::new(
            make_filter(&f.get::<String>("filter")?)?,
            f.get("levels")?,
            f.get::<Boundary>("boundary")?,
        )?),
        "none" => None,
        other => return Err(Error::ModelFormat(format!("unknown decomposition `{other}`"))),
    };
    let assignment = BandAssignment::new(f.get("split_level")?)?.with_smooth(f.get::<ModelKind>("smooth_model")?);
    let count: usize = f.get("components")?;

    let mut components = Vec::with_capacity(count);
    for i in 0..count {
        let key = |name: &str| format!("component.{i}.{name}");
        let component = match f.get::<ModelKind>(&key("kind"))? {
            ModelKind::Ar => {
                let coefficients: Vec<f64> = f.list(&key("coefficients"))?;
                if coefficients.len() != f.get::<usize>(&key("order"))? {
                    return Err(Error::ModelFormat(format!("component {i}: order does not match coefficients")));
                }
                ComponentModel::Ar(ArModel::from_stored(
                    coefficients,
                    f.get(&key("intercept"))?,
                    f.get(&key("innovation_variance"))?,
                    f.get(&key("training_mean"))?,
                    f.list(&key("reflection"))?,
                )?)
            }
            ModelKind::Svr => {
                let lag: usize = f.get(&key("lag"))?;
                let kernel = match f.get::<String>(&key("kernel"))?.as_str() {
                    "linear" => KernelSpec::Linear,
                    "rbf" => KernelSpec::Rbf {
                        gamma: f.get(&key("gamma"))?,
                    },
                    "polynomial" => KernelSpec::Polynomial {
                        degree: f.get(&key("degree"))?,
                        coef0: f.get(&key("coef0"))?,
                    },
                    other => return Err(Error::ModelFormat(format!("component {i}: unknown kernel `{other}`"))),
                };
                kernel.validate()?;
                let hyperparams = SvrHyperparams {
                    c: f.get(&key("c"))?,
                    epsilon: f.get(&key("epsilon"))?,
                    tol: f.get(&key("tol"))?,
                    max_iter: f.get(&key("max_iter"))?,
                };
                hyperparams.validate()?;
                let scaling = Scaling {
                    input_mean: f.list(&key("input_mean"))?,
                    input_scale: f.list(&key("input_scale"))?,
                    target_mean: f.get(&key("target_mean"))?,
                    target_scale: f.get(&key("target_scale"))?,
                };
                if scaling.input_mean.len() != lag || scaling.input_scale.len() != lag {
                    return Err(Error::ModelFormat(format!("component {i}: scaling does not match lag {lag}")));
                }
                let n_sv: usize = f.get(&key("support_count"))?;
                let dual: Vec<f64> = f.list(&key("dual_coefficients"))?;
                let indices: Vec<usize> = f.list(&key("support_indices"))?;
                let flat: Vec<f64> = f.list(&key("support_vectors"))?;
                if dual.len() != n_sv || indices.len() != n_sv || flat.len() != n_sv * lag {
                    return Err(Error::ModelFormat(format!(
                        "component {i}: support vector arrays do not match support_count {n_sv}"
                    )));
                }
                let svs = flat.chunks(lag.max(1)).map(<[f64]>::to_vec).collect();
                ComponentModel::Svr {
                    model: SvrModel::assemble(
                        svs,
                        dual,
                        indices,
                        f.get(&key("bias"))?,
                        kernel,
                        hyperparams,
                        scaling,
                        f.get(&key("converged"))?,
                        f.get(&key("dual_objective"))?,
                    ),
                    lag,
                }
            }
        };
        components.push(component);
    }

    let training_window = f.get("training_start")?..f.get("training_end")?;
    HybridModel::from_components(decomposition, assignment, components, training_window, f.get("history_window")?)
}

pub fn write_model(model: &HybridModel, path: &Path) -> Result<()> {
    crate::series::write_atomic(path, to_text(model).as_bytes())
}

pub fn read_model(path: &Path) -> Result<HybridModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_text(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hybrid::{fit_hybrid, forecast_hybrid, ArConfig, ArOrder, HybridConfig, SvrConfig};
    use crate::synth::sine_plus_ar;

    fn fitted() -> (HybridModel, Vec<f64>) {
        let y = sine_plus_ar(8.0, 2.0, 48.0, 0.6, 0.5, 700, 3);
        let cfg = HybridConfig {
            decomposition: Some(DecompositionSpec::new(make_filter("db3").unwrap(), 3, Boundary::Reflect).unwrap()),
            assignment: BandAssignment::new(2).unwrap(),
            ar: ArConfig {
                order: ArOrder::Auto { max_order: 5 },
            },
            svr: SvrConfig {
                lag: 5,
                kernel: Some(KernelSpec::Polynomial { degree: 2, coef0: 1.0 }),
                hyperparams: SvrHyperparams {
                    max_iter: 20,
                    ..Default::default()
                },
            },
            history_window: 400,
        };
        (fit_hybrid(&y[..600], &cfg).unwrap(), y)
    }

    #[test]
    fn round_trip_is_exact() {
        let (model, y) = fitted();
        let text = to_text(&model);
        let back = from_text(&text).unwrap();
        assert_eq!(to_text(&back), text);
        assert_eq!(forecast_hybrid(&back, &y, 20).unwrap(), forecast_hybrid(&model, &y, 20).unwrap());
        assert_eq!(back.training_window(), 0..600);
    }

    #[test]
    fn floats_keep_every_bit() {
        for v in [0.1, 1.0 / 3.0, -2.718281828459045e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(num(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn no_decomposition_round_trip() {
        let y = sine_plus_ar(8.0, 2.0, 48.0, 0.6, 0.5, 300, 3);
        let cfg = HybridConfig {
            decomposition: None,
            assignment: BandAssignment::new(1).unwrap().with_smooth(ModelKind::Ar),
            ..Default::default()
        };
        let model = fit_hybrid(&y, &cfg).unwrap();
        let back = from_text(&to_text(&model)).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn malformed_files_rejected() {
        let (model, _) = fitted();
        let text = to_text(&model);
        assert!(from_text(&text.replace("version = 1", "version = 2")).is_err());
        assert!(from_text(&text.replace("components = 4", "components = 5")).is_err());
        let dropped: String = text.lines().filter(|l| !l.starts_with("component.1.intercept")).map(|l| format!("{l}\n")).collect();
        let err = from_text(&dropped).unwrap_err();
        assert!(err.to_string().contains("component.1.intercept"), "{err}");
        assert!(from_text("format = something-else\n").is_err());
        assert!(from_text(&format!("{text}levels = 3\n")).is_err());
    }
}
