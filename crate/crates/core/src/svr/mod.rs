//! ε-insensitive support vector regression on lag-embedded series.
//!
//! The predictor is `z = Σ β_i K(x_i, x) + b` evaluated on standardized
//! inputs; the solver lives in [`solver`].

mod kernel;
mod solver;

pub use kernel::KernelSpec;

use crate::error::{check_finite, Error, Result};

/// Default lag for embedded series (two hours of 10-minute samples).
pub const DEFAULT_LAG: usize = 12;

/// Training hyperparameters. `epsilon` is measured on the standardized
/// target, i.e. in units of the target's standard deviation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvrHyperparams {
    pub c: f64,
    pub epsilon: f64,
    pub tol: f64,
    /// Budget in sweeps; one sweep is as many pair updates as there are
    /// training points.
    pub max_iter: usize,
}

impl Default for SvrHyperparams {
    fn default() -> Self {
        Self {
            c: 1.0,
            epsilon: 0.05,
            tol: 1e-3,
            max_iter: 10_000,
        }
    }
}

impl SvrHyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParameter(format!("C must be positive, got {}", self.c)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be non-negative, got {}",
                self.epsilon
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// Per-coordinate affine normalization `(v - mean) / scale`.
#[derive(Clone, Debug, PartialEq)]
pub struct Scaling {
    pub input_mean: Vec<f64>,
    pub input_scale: Vec<f64>,
    pub target_mean: f64,
    pub target_scale: f64,
}

fn mean_and_spread(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let (n, sum) = values.clone().fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    let mean = sum / n as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    let sd = var.sqrt();
    (mean, if sd > 1e-12 * mean.abs().max(1.0) { sd } else { 1.0 })
}

impl Scaling {
    fn fit(inputs: &[Vec<f64>], targets: &[f64]) -> Self {
        let dim = inputs[0].len();
        let (input_mean, input_scale) = (0..dim)
            .map(|k| mean_and_spread(inputs.iter().map(move |x| x[k])))
            .unzip();
        let (target_mean, target_scale) = mean_and_spread(targets.iter().copied());
        Self {
            input_mean,
            input_scale,
            target_mean,
            target_scale,
        }
    }

    pub fn dim(&self) -> usize {
        self.input_mean.len()
    }

    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.input_mean.iter().zip(&self.input_scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn normalize_target(&self, z: f64) -> f64 {
        (z - self.target_mean) / self.target_scale
    }
}

/// Inputs `(y_{t-m}, …, y_{t-1})` paired with targets `y_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct LagPairs {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl LagPairs {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

/// Lag-embeds `series` with window `lag`, yielding `N - lag` pairs in time order.
pub fn embed(series: &[f64], lag: usize) -> Result<LagPairs> {
    if lag == 0 {
        return Err(Error::InvalidParameter("lag must be at least 1".into()));
    }
    if series.len() <= lag {
        return Err(Error::InsufficientData(format!(
            "embedding with lag {lag} needs more than {lag} samples, got {}",
            series.len()
        )));
    }
    Ok(LagPairs {
        inputs: series.windows(lag).take(series.len() - lag).map(<[f64]>::to_vec).collect(),
        targets: series[lag..].to_vec(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvrModel {
    support_vectors: Vec<Vec<f64>>,
    dual_coefficients: Vec<f64>,
    support_indices: Vec<usize>,
    bias: f64,
    kernel: KernelSpec,
    hyperparams: SvrHyperparams,
    scaling: Scaling,
    converged: bool,
    dual_objective: f64,
    objective_trace: Vec<f64>,
    /// Support vectors in normalized space, derived from the above.
    normalized_svs: Vec<Vec<f64>>,
}

impl SvrModel {
    /// A model that always predicts `value` for `dim`-dimensional inputs.
    pub fn constant(value: f64, dim: usize) -> Self {
        Self::assemble(
            Vec::new(),
            Vec::new(),
            Vec::new(),
            value,
            KernelSpec::rbf_for_dim(dim),
            SvrHyperparams::default(),
            Scaling {
                input_mean: vec![0.0; dim],
                input_scale: vec![1.0; dim],
                target_mean: 0.0,
                target_scale: 1.0,
            },
            true,
            0.0,
        )
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        support_vectors: Vec<Vec<f64>>,
        dual_coefficients: Vec<f64>,
        support_indices: Vec<usize>,
        bias: f64,
        kernel: KernelSpec,
        hyperparams: SvrHyperparams,
        scaling: Scaling,
        converged: bool,
        dual_objective: f64,
    ) -> Self {
        let normalized_svs = support_vectors.iter().map(|x| scaling.normalize(x)).collect();
        Self {
            support_vectors,
            dual_coefficients,
            support_indices,
            bias,
            kernel,
            hyperparams,
            scaling,
            converged,
            dual_objective,
            objective_trace: Vec::new(),
            normalized_svs,
        }
    }

    pub fn support_vectors(&self) -> &[Vec<f64>] {
        &self.support_vectors
    }

    /// `β_i = α_i - α_i*` for each support vector, in normalized target units.
    pub fn dual_coefficients(&self) -> &[f64] {
        &self.dual_coefficients
    }

    /// Training-set index of each support vector.
    pub fn support_indices(&self) -> &[usize] {
        &self.support_indices
    }

    /// Output offset in original units.
    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn hyperparams(&self) -> &SvrHyperparams {
        &self.hyperparams
    }

    pub fn scaling(&self) -> &Scaling {
        &self.scaling
    }

    pub fn dim(&self) -> usize {
        self.scaling.dim()
    }

    /// False when the solver stopped on its iteration budget.
    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Final dual objective (maximization form, normalized units).
    pub fn dual_objective(&self) -> f64 {
        self.dual_objective
    }

    /// Dual objective recorded after each solver sweep.
    pub fn objective_trace(&self) -> &[f64] {
        &self.objective_trace
    }
}

/// Trains an ε-SVR on lag pairs.
pub fn train_svr(pairs: &LagPairs, kernel: KernelSpec, hp: &SvrHyperparams) -> Result<SvrModel> {
    kernel.validate()?;
    hp.validate()?;
    if pairs.inputs.len() != pairs.targets.len() {
        return Err(Error::LengthMismatch(format!(
            "{} inputs but {} targets",
            pairs.inputs.len(),
            pairs.targets.len()
        )));
    }
    if pairs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "SVR training needs at least 2 pairs, got {}",
            pairs.len()
        )));
    }
    let dim = pairs.inputs[0].len();
    if dim == 0 {
        return Err(Error::InvalidParameter("input vectors are empty".into()));
    }
    for x in &pairs.inputs {
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: x.len(),
            });
        }
        check_finite(x)?;
    }
    check_finite(&pairs.targets)?;

    let scaling = Scaling::fit(&pairs.inputs, &pairs.targets);
    let inputs: Vec<Vec<f64>> = pairs.inputs.iter().map(|x| scaling.normalize(x)).collect();
    let targets: Vec<f64> = pairs
        .targets
        .iter()
        .map(|&z| scaling.normalize_target(z))
        .collect();

    let sol = solver::solve(&inputs, &targets, kernel, hp.c, hp.epsilon, hp.tol, hp.max_iter);

    let mut support_vectors = Vec::new();
    let mut dual_coefficients = Vec::new();
    let mut support_indices = Vec::new();
    for (i, &beta) in sol.beta.iter().enumerate() {
        if beta.abs() >= 1e-12 {
            support_vectors.push(pairs.inputs[i].clone());
            dual_coefficients.push(beta);
            support_indices.push(i);
        }
    }

    let bias = sol.bias * scaling.target_scale + scaling.target_mean;
    let mut model = SvrModel::assemble(
        support_vectors,
        dual_coefficients,
        support_indices,
        bias,
        kernel,
        *hp,
        scaling,
        sol.converged,
        *sol.trace.last().unwrap_or(&0.0),
    );
    model.objective_trace = sol.trace;
    Ok(model)
}

/// Evaluates the regression function at lag vector `x`.
pub fn predict_svr(model: &SvrModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: x.len(),
        });
    }
    check_finite(x)?;
    Ok(predict_unchecked(model, x))
}

fn predict_unchecked(model: &SvrModel, x: &[f64]) -> f64 {
    if model.dual_coefficients.is_empty() {
        return model.bias;
    }
    let xn = model.scaling.normalize(x);
    let sum: f64 = model
        .normalized_svs
        .iter()
        .zip(&model.dual_coefficients)
        .map(|(sv, beta)| beta * model.kernel.eval(sv, &xn))
        .sum();
    sum * model.scaling.target_scale + model.bias
}

/// Recursive multi-step forecast from the last `lag` values of `history`.
pub fn forecast_svr(model: &SvrModel, history: &[f64], lag: usize, horizon: usize) -> Result<Vec<f64>> {
    if lag != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: lag,
        });
    }
    if history.len() < lag {
        return Err(Error::InsufficientData(format!(
            "SVR forecast with lag {lag} needs at least {lag} history values, got {}",
            history.len()
        )));
    }
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    check_finite(&history[history.len() - lag..])?;

    let mut window = history[history.len() - lag..].to_vec();
    let mut out = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let next = predict_unchecked(model, &window[window.len() - lag..]);
        out.push(next);
        window.push(next);
    }
    Ok(out)
}
