//! Binary logistic regression trained by full-batch gradient descent.
//!
//! The learner deliberately flattens the lot structure: every (choice, prime
//! indicator) pair across all lots becomes one independent training sample.
//! That is exactly the relational reduction a point-wise method performs, and
//! the reason it needs lot-aggregate features to see lot context. The fitted
//! logit serves as a scoring function; it is monotone in the predicted
//! probability, so both induce the same per-lot argmax.
//!
//! Training is full-batch with a fixed accumulation order, so a fit is
//! bit-for-bit reproducible from its config.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Dataset, Lot};
use crate::scoring::Scorer;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2_penalty: f64,
    /// Seeds the weight initialization.
    pub seed: u64,
    /// Loss weight of positive (prime) samples; 1.0 leaves the roughly
    /// 1-positive-in-21 imbalance untouched.
    pub positive_weight: f64,
}

impl TrainConfig {
    pub fn new(learning_rate: f64, epochs: usize, seed: u64) -> Self {
        Self {
            learning_rate,
            epochs,
            l2_penalty: 0.0,
            seed,
            positive_weight: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning_rate must be non-negative and finite"));
        }
        if self.epochs == 0 {
            return Err(Error::invalid("epochs must be at least 1"));
        }
        if !(self.l2_penalty >= 0.0 && self.l2_penalty.is_finite()) {
            return Err(Error::invalid("l2_penalty must be non-negative"));
        }
        if !(self.positive_weight > 0.0 && self.positive_weight.is_finite()) {
            return Err(Error::invalid("positive_weight must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    weights: Vec<f64>,
    bias: f64,
}

impl LogisticModel {
    pub fn new(weights: Vec<f64>, bias: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("a logistic model needs weights"));
        }
        if weights.iter().any(|w| !w.is_finite()) || !bias.is_finite() {
            return Err(Error::invalid("non-finite model parameter"));
        }
        Ok(Self { weights, bias })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn logit(&self, features: &[f64]) -> Result<f64> {
        if features.len() != self.weights.len() {
            return Err(Error::invalid(format!(
                "choice has {} features, model expects {}",
                features.len(),
                self.weights.len()
            )));
        }
        Ok(self
            .weights
            .iter()
            .zip(features)
            .map(|(w, x)| w * x)
            .sum::<f64>()
            + self.bias)
    }

    pub fn probability(&self, features: &[f64]) -> Result<f64> {
        Ok(sigmoid(self.logit(features)?))
    }

    /// Flat text form: a `bias <value>` line, then one `weight <name> <value>`
    /// line per feature, 17 significant digits for exact round-trips.
    pub fn to_text(&self, feature_names: &[String]) -> Result<String> {
        if feature_names.len() != self.weights.len() {
            return Err(Error::schema(format!(
                "model has {} weights, schema has {} features",
                self.weights.len(),
                feature_names.len()
            )));
        }
        let mut out = format!("bias {:.16e}\n", self.bias);
        for (name, w) in feature_names.iter().zip(&self.weights) {
            out.push_str(&format!("weight {name} {w:.16e}\n"));
        }
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<(Vec<String>, LogisticModel)> {
        let mut bias = None;
        let mut names = Vec::new();
        let mut weights = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                ["bias", value] => {
                    let v: f64 = value.parse().map_err(|_| {
                        Error::invalid(format!("line {}: bad bias {value}", lineno + 1))
                    })?;
                    if bias.replace(v).is_some() {
                        return Err(Error::invalid(format!(
                            "line {}: duplicate bias line",
                            lineno + 1
                        )));
                    }
                }
                ["weight", name, value] => {
                    let v: f64 = value.parse().map_err(|_| {
                        Error::invalid(format!("line {}: bad weight {value}", lineno + 1))
                    })?;
                    names.push(name.to_string());
                    weights.push(v);
                }
                _ => {
                    return Err(Error::invalid(format!(
                        "line {}: expected `bias <value>` or `weight <name> <value>`",
                        lineno + 1
                    )))
                }
            }
        }
        let bias = bias.ok_or_else(|| Error::invalid("missing bias line"))?;
        Ok((names, LogisticModel::new(weights, bias)?))
    }
}

impl Scorer for LogisticModel {
    fn score_choice(&self, lot: &Lot, index: usize) -> f64 {
        self.logit(lot.choice(index).features()).unwrap_or(f64::NAN)
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn pooled_samples(dataset: &Dataset) -> impl Iterator<Item = (&[f64], f64)> {
    dataset.lots().iter().flat_map(|lot| {
        lot.choices().iter().enumerate().map(move |(i, c)| {
            let y = if lot.prime_index() == Some(i) { 1.0 } else { 0.0 };
            (c.features(), y)
        })
    })
}

/// Mean weighted negative log-likelihood of the prime indicators plus the
/// L2 term (l2/2)·||w||²; the bias is not penalized.
pub fn regularized_loss(
    dataset: &Dataset,
    weights: &[f64],
    bias: f64,
    l2_penalty: f64,
    positive_weight: f64,
) -> Result<f64> {
    if dataset.dimension() != weights.len() {
        return Err(Error::invalid("weight vector does not match dataset dimension"));
    }
    let n = dataset.num_choices() as f64;
    let mut sum = 0.0;
    for (x, y) in pooled_samples(dataset) {
        let z: f64 = weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + bias;
        let c = if y == 1.0 { positive_weight } else { 1.0 };
        sum += c * (softplus(z) - y * z);
    }
    let penalty = 0.5 * l2_penalty * weights.iter().map(|w| w * w).sum::<f64>();
    Ok(sum / n + penalty)
}

/// Analytic gradient of [`regularized_loss`] with respect to (weights, bias).
pub fn loss_gradient(
    dataset: &Dataset,
    weights: &[f64],
    bias: f64,
    l2_penalty: f64,
    positive_weight: f64,
) -> Result<(Vec<f64>, f64)> {
    if dataset.dimension() != weights.len() {
        return Err(Error::invalid("weight vector does not match dataset dimension"));
    }
    let n = dataset.num_choices() as f64;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for (x, y) in pooled_samples(dataset) {
        let z: f64 = weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + bias;
        let c = if y == 1.0 { positive_weight } else { 1.0 };
        let residual = c * (sigmoid(z) - y);
        for (g, v) in grad_w.iter_mut().zip(x) {
            *g += residual * v;
        }
        grad_b += residual;
    }
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g / n + l2_penalty * w;
    }
    Ok((grad_w, grad_b / n))
}

/// The seeded starting point used by [`fit_logistic`]: small uniform weights,
/// zero bias.
pub fn initial_model(dimension: usize, seed: u64) -> Result<LogisticModel> {
    if dimension == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = (0..dimension)
        .map(|_| rng.random_range(-0.01..0.01))
        .collect();
    LogisticModel::new(weights, 0.0)
}

/// Fit by full-batch gradient descent and also return the loss trace,
/// one value at initialization and one after every epoch.
pub fn fit_logistic_traced(
    dataset: &Dataset,
    config: &TrainConfig,
) -> Result<(LogisticModel, Vec<f64>)> {
    config.validate()?;
    if dataset.lots().is_empty() {
        return Err(Error::invalid("cannot fit on an empty dataset"));
    }
    let model = initial_model(dataset.dimension(), config.seed)?;
    let mut weights = model.weights().to_vec();
    let mut bias = model.bias();
    let mut trace = Vec::with_capacity(config.epochs + 1);
    trace.push(regularized_loss(
        dataset,
        &weights,
        bias,
        config.l2_penalty,
        config.positive_weight,
    )?);
    for epoch in 0..config.epochs {
        let (grad_w, grad_b) = loss_gradient(
            dataset,
            &weights,
            bias,
            config.l2_penalty,
            config.positive_weight,
        )?;
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= config.learning_rate * g;
        }
        bias -= config.learning_rate * grad_b;
        let loss = regularized_loss(
            dataset,
            &weights,
            bias,
            config.l2_penalty,
            config.positive_weight,
        )?;
        if !loss.is_finite() {
            return Err(Error::TrainingDiverged { epoch });
        }
        trace.push(loss);
    }
    Ok((LogisticModel::new(weights, bias)?, trace))
}

pub fn fit_logistic(dataset: &Dataset, config: &TrainConfig) -> Result<LogisticModel> {
    fit_logistic_traced(dataset, config).map(|(m, _)| m)
}
