//! Command-line driver.
//!
//! Every subcommand accepts `--config <file>` plus one flag per config key
//! (`--svr-c 2`, `--training-window month`, ...); flags win over the file.
//! Usage errors exit with 2, runtime failures with 1.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{RunConfig, KEYS, SEED_ENV};
use crate::error::{Error, Result};
use crate::eval::{self, ArRecipe, HybridRecipe, PerfectRecipe, Recipe, SvrRecipe};
use crate::hybrid::{self, read_model, write_model};
use crate::series::{self, format_timestamp, write_atomic, TimeSeries};
use crate::synth::{synth_generate, SynthKind};
use crate::wavelet::decompose;

#[derive(Parser, Debug)]
#[command(name = "windcast", version, about = "Wavelet hybrid AR/SVR wind-speed forecasting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Split a series into detail and smooth components.
    Decompose {
        /// Input series CSV (`-` for stdin).
        #[arg(long, short)]
        input: PathBuf,
        /// Output CSV; stdout when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Fit a hybrid model on the training window and save it.
    Fit {
        #[arg(long, short)]
        input: PathBuf,
        /// Destination model file.
        #[arg(long, short)]
        model: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Forecast `horizon` steps past the end of a history file.
    Forecast {
        #[arg(long, short)]
        model: PathBuf,
        /// History CSV (`-` for stdin).
        #[arg(long = "history")]
        history: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Add one column per component forecast.
        #[arg(long)]
        components: bool,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Rolling-origin evaluation of one recipe.
    Evaluate {
        #[arg(long, short)]
        input: PathBuf,
        /// hybrid, ar, svr or perfect (the look-ahead test double).
        #[arg(long, default_value = "hybrid")]
        recipe: String,
        #[command(flatten)]
        outputs: EvalOutputs,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Rolling-origin evaluation of several recipes over the same origins.
    Compare {
        #[arg(long, short)]
        input: PathBuf,
        /// Comma-separated recipes, each `kind` or `label=kind`.
        #[arg(long, default_value = "hybrid,ar")]
        recipes: String,
        /// Position of the origin expanded into the forecast trace.
        #[arg(long, default_value_t = 0)]
        trace_origin: usize,
        #[command(flatten)]
        outputs: EvalOutputs,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Generate a synthetic series.
    Synth {
        /// constant, ar, sine_plus_ar or mackey_glass.
        #[arg(long)]
        kind: String,
        /// Number of samples.
        #[arg(short = 'n', long = "samples")]
        samples: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[command(flatten)]
        params: SynthParams,
        #[command(flatten)]
        run: RunFlags,
    },
}

#[derive(Args, Debug)]
struct EvalOutputs {
    /// Per-origin metrics CSV.
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Summary CSV; stdout when omitted.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Forecast trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct SynthParams {
    /// Level of a constant series.
    #[arg(long)]
    value: Option<f64>,
    /// AR coefficients, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    coefficients: Option<Vec<f64>>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mean: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    offset: Option<f64>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    period: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    #[arg(long)]
    scale: Option<f64>,
}

macro_rules! run_flags {
    ($($field:ident),* $(,)?) => {
        /// `--config` plus one optional flag per config key.
        #[derive(Args, Debug, Default)]
        struct RunFlags {
            /// Flat `key = value` config file.
            #[arg(long)]
            config: Option<PathBuf>,
            $(
                #[arg(long, allow_negative_numbers = true, value_name = "VALUE")]
                $field: Option<String>,
            )*
        }

        impl RunFlags {
            fn pairs(&self) -> Vec<(String, String)> {
                let mut out = Vec::new();
                $(
                    if let Some(v) = &self.$field {
                        out.push((stringify!($field).to_string(), v.clone()));
                    }
                )*
                out
            }
        }

        #[cfg(test)]
        const FLAG_KEYS: &[&str] = &[$(stringify!($field)),*];
    };
}

run_flags!(
    filter,
    levels,
    boundary,
    split_level,
    smooth_model,
    ar_order,
    ar_max_order,
    svr_kernel,
    svr_c,
    svr_epsilon,
    svr_gamma,
    svr_degree,
    svr_coef0,
    svr_tol,
    svr_max_iter,
    svr_lag,
    horizon,
    stride,
    training_window,
    history_window,
    seed,
    interval,
    gap_policy,
    refit,
);

impl RunFlags {
    fn resolve(&self, env_seed: Option<&str>) -> Result<RunConfig> {
        RunConfig::resolve(self.config.as_deref(), env_seed, &self.pairs())
    }
}

/// Runs the CLI with the process environment and standard streams.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env_seed = std::env::var(SEED_ENV).ok();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, env_seed.as_deref(), &mut stdout.lock(), &mut stderr.lock())
}

/// Runs one CLI invocation and returns its exit status. `args` includes the
/// program name.
pub fn run<I, T>(args: I, env_seed: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    2
                }
            };
        }
    };
    match execute(cli.command, env_seed, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "windcast: {e}");
            match e {
                Error::Config(_) => 2,
                _ => 1,
            }
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Error::io("<stdin>", e))?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
    }
}

fn load_series(path: &Path, cfg: &RunConfig) -> Result<TimeSeries> {
    let text = read_input(path)?;
    series::parse_csv(&text, &path.display().to_string(), cfg.interval, cfg.gap_policy)
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn synth_kind(name: &str, p: &SynthParams) -> Result<SynthKind> {
    let kind = match name {
        "constant" => SynthKind::constant(p.value.unwrap_or(0.0)),
        "ar" => SynthKind::Ar {
            coefficients: p.coefficients.clone().unwrap_or_else(|| vec![0.75, -0.5]),
            sigma: p.sigma.unwrap_or(1.0),
            mean: p.mean.unwrap_or(0.0),
        },
        "sine_plus_ar" => {
            let SynthKind::SinePlusAr {
                offset,
                amplitude,
                period,
                phi,
                sigma,
            } = SynthKind::daily_cycle()
            else {
                unreachable!()
            };
            SynthKind::SinePlusAr {
                offset: p.offset.unwrap_or(offset),
                amplitude: p.amplitude.unwrap_or(amplitude),
                period: p.period.unwrap_or(period),
                phi: p.phi.unwrap_or(phi),
                sigma: p.sigma.unwrap_or(sigma),
            }
        }
        "mackey_glass" => match SynthKind::mackey_glass() {
            SynthKind::MackeyGlass {
                delay,
                beta,
                gamma,
                exponent,
                substeps,
                scale,
                offset,
            } => SynthKind::MackeyGlass {
                delay,
                beta,
                gamma,
                exponent,
                substeps,
                scale: p.scale.unwrap_or(scale),
                offset: p.offset.unwrap_or(offset),
            },
            _ => unreachable!(),
        },
        other => {
            return Err(Error::Config(format!(
                "unknown synth kind `{other}` (expected constant, ar, sine_plus_ar or mackey_glass)"
            )))
        }
    };
    Ok(kind)
}

fn recipe(label: &str, kind: &str, cfg: &RunConfig, series: &TimeSeries) -> Result<Box<dyn Recipe>> {
    let label = label.to_string();
    Ok(match kind {
        "hybrid" => Box::new(HybridRecipe {
            label,
            config: cfg.hybrid_config()?,
        }),
        "ar" => Box::new(ArRecipe {
            label,
            config: cfg.ar_config(),
        }),
        "svr" => Box::new(SvrRecipe {
            label,
            config: cfg.svr_config()?,
        }),
        "perfect" => Box::new(PerfectRecipe {
            label,
            series: series.values().to_vec(),
        }),
        other => {
            return Err(Error::Config(format!(
                "unknown recipe `{other}` (expected hybrid, ar, svr or perfect)"
            )))
        }
    })
}

fn parse_recipes(list: &str, cfg: &RunConfig, series: &TimeSeries) -> Result<Vec<Box<dyn Recipe>>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| match item.split_once('=') {
            Some((label, kind)) => recipe(label.trim(), kind.trim(), cfg, series),
            None => recipe(item, item, cfg, series),
        })
        .collect()
}

fn write_eval_outputs(
    outputs: &EvalOutputs,
    evaluations: &[eval::Evaluation],
    summaries: &[eval::Summary],
    trace: Option<&[eval::TraceRow]>,
    stdout: &mut dyn Write,
) -> Result<()> {
    if let Some(path) = &outputs.metrics {
        write_atomic(path, eval::metrics_csv(evaluations).as_bytes())?;
    }
    if let (Some(path), Some(trace)) = (&outputs.trace, trace) {
        write_atomic(path, eval::trace_csv(trace).as_bytes())?;
    }
    emit(outputs.summary.as_deref(), &eval::summary_csv(summaries), stdout)
}

fn execute(command: Command, env_seed: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match command {
        Command::Synth {
            kind,
            samples,
            out,
            params,
            run,
        } => {
            let cfg = run.resolve(env_seed)?;
            let kind = synth_kind(&kind, &params)?;
            let series = synth_generate(&kind, samples, cfg.seed)?;
            emit(out.as_deref(), &series.to_csv(), stdout)
        }

        Command::Decompose { input, out, run } => {
            let cfg = run.resolve(env_seed)?;
            let series = load_series(&input, &cfg)?;
            if !series.missing().is_empty() {
                return Err(Error::InsufficientData(
                    "decompose needs a series without missing ranges".into(),
                ));
            }
            let Some(spec) = cfg.decomposition()? else {
                return Err(Error::Config("decompose needs levels >= 1".into()));
            };
            let d = decompose(series.values(), &spec)?;
            let mut text = String::from("time,index");
            for j in 1..=spec.levels() {
                let _ = write!(text, ",d{j}");
            }
            text.push_str(",smooth\n");
            for i in 0..series.len() {
                let _ = write!(text, "{},{}", format_timestamp(series.timestamp(i)), i);
                for c in d.components() {
                    let _ = write!(text, ",{}", c[i]);
                }
                text.push('\n');
            }
            emit(out.as_deref(), &text, stdout)
        }

        Command::Fit { input, model, run } => {
            let cfg = run.resolve(env_seed)?;
            let series = load_series(&input, &cfg)?;
            let window = cfg.eval_config().training_range(&series);
            if window.is_empty() || series.has_missing_in(window.clone()) {
                return Err(Error::InsufficientData(format!(
                    "training window {window:?} is empty or has missing samples"
                )));
            }
            let mut fitted = hybrid::fit_hybrid(&series.values()[window.clone()], &cfg.hybrid_config()?)?;
            fitted.set_training_window(window.clone());
            write_model(&fitted, &model)?;
            let _ = writeln!(
                stderr,
                "fitted {} component models on samples {}..{}",
                fitted.components().len(),
                window.start,
                window.end
            );
            Ok(())
        }

        Command::Forecast {
            model,
            history,
            out,
            components,
            run,
        } => {
            let cfg = run.resolve(env_seed)?;
            let model = read_model(&model)?;
            let series = load_series(&history, &cfg)?;
            let start = series.missing().last().map_or(0, |r| r.end);
            let hist = &series.values()[start..];
            let parts = hybrid::forecast_components(&model, hist, cfg.horizon)?;
            let total = hybrid::sum_components(&parts);
            let levels = parts.len() - 1;

            let mut text = String::from("time,predicted");
            if components {
                if model.decomposition().is_some() {
                    for j in 1..=levels {
                        let _ = write!(text, ",d{j}");
                    }
                    text.push_str(",smooth");
                } else {
                    text.push_str(",series");
                }
            }
            text.push('\n');
            for (k, value) in total.iter().enumerate() {
                let _ = write!(text, "{},{}", format_timestamp(series.timestamp(series.len() + k)), value);
                if components {
                    for p in &parts {
                        let _ = write!(text, ",{}", p[k]);
                    }
                }
                text.push('\n');
            }
            emit(out.as_deref(), &text, stdout)
        }

        Command::Evaluate {
            input,
            recipe: kind,
            outputs,
            run,
        } => {
            let cfg = run.resolve(env_seed)?;
            let series = load_series(&input, &cfg)?;
            let recipe = recipe(&kind, &kind, &cfg, &series)?;
            let evaluation = eval::evaluate(&series, recipe.as_ref(), &cfg.eval_config())?;
            let summary = eval::summarize(&evaluation.label, &evaluation.rows)?;
            let trace: Vec<eval::TraceRow> = evaluation
                .rows
                .iter()
                .zip(&evaluation.forecasts)
                .filter(|(r, _)| !r.is_skipped())
                .take(1)
                .flat_map(|(r, f)| {
                    f.iter().enumerate().map(|(k, p)| eval::TraceRow {
                        time: series.timestamp(r.origin_index + k),
                        actual: series.values()[r.origin_index + k],
                        predicted: *p,
                        model: evaluation.label.clone(),
                    })
                })
                .collect();
            write_eval_outputs(&outputs, &[evaluation], &[summary], Some(&trace), stdout)
        }

        Command::Compare {
            input,
            recipes,
            trace_origin,
            outputs,
            run,
        } => {
            let cfg = run.resolve(env_seed)?;
            let series = load_series(&input, &cfg)?;
            let boxed = parse_recipes(&recipes, &cfg, &series)?;
            if boxed.len() < 2 {
                return Err(Error::Config(format!(
                    "compare needs at least two recipes, got `{recipes}`"
                )));
            }
            let refs: Vec<&dyn Recipe> = boxed.iter().map(AsRef::as_ref).collect();
            let cmp = eval::compare(&series, &refs, &cfg.eval_config(), trace_origin)?;
            write_eval_outputs(&outputs, &cmp.evaluations, &cmp.summaries, Some(&cmp.trace), stdout)
        }
    }
}

/// Names of the per-key flags, as typed on the command line.
pub fn config_flags() -> Vec<String> {
    KEYS.iter().map(|k| format!("--{}", k.replace('_', "-"))).collect()
}
