//! The declarative run configuration consumed by `optchoice run`.
//!
//! TOML document with a `[data]` section (file path or generator preset),
//! optional `[[augment]]` entries, one or more `[[method]]` sections, and an
//! `[eval]` section choosing the evaluation mode, feature negation, and the
//! output path.

use std::path::Path;

use serde::Deserialize;

use optchoice::{
    default_starts, seeded_starts, Aggregate, AugmentationEntry, AugmentationSpec,
    BruteForceConfig, BruteForceTrainer, LogisticTrainer, NelderMeadConfig,
    NelderMeadTrainer, TrainConfig, Trainer,
};

use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataSource,
    #[serde(default)]
    pub augment: Vec<AugmentEntryConfig>,
    #[serde(default)]
    pub method: Vec<MethodConfig>,
    pub eval: EvalSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSource {
    pub file: Option<String>,
    pub preset: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugmentEntryConfig {
    pub feature: String,
    pub aggregate: String,
    pub name: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MethodConfig {
    Bruteforce {
        n: u32,
        tolerance: Option<f64>,
    },
    Neldermead {
        starts: Option<usize>,
        seed: Option<u64>,
        max_iterations: Option<usize>,
    },
    Logistic {
        learning_rate: f64,
        epochs: usize,
        l2_penalty: Option<f64>,
        seed: Option<u64>,
        positive_weight: Option<f64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default)]
    pub negate_features: bool,
    pub output: String,
}

fn default_mode() -> String {
    "both".to_string()
}

impl RunConfig {
    pub fn parse(path: &Path) -> CliResult<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    pub fn eval_mode(&self) -> CliResult<optchoice::EvalMode> {
        match self.eval.mode.as_str() {
            "full" => Ok(optchoice::EvalMode::Full),
            "loo" => Ok(optchoice::EvalMode::Loo),
            "both" => Ok(optchoice::EvalMode::Both),
            other => Err(CliError::usage(format!(
                "eval.mode must be full, loo, or both; found {other}"
            ))),
        }
    }

    pub fn augmentation(&self) -> CliResult<Option<AugmentationSpec>> {
        if self.augment.is_empty() {
            return Ok(None);
        }
        let entries = self
            .augment
            .iter()
            .map(|e| {
                let aggregate: Aggregate = e
                    .aggregate
                    .parse()
                    .map_err(|err: optchoice::Error| CliError::usage(err.to_string()))?;
                Ok(match &e.name {
                    Some(name) => AugmentationEntry {
                        feature: e.feature.clone(),
                        aggregate,
                        new_name: name.clone(),
                    },
                    None => AugmentationEntry::named_after(&e.feature, aggregate),
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok(Some(AugmentationSpec::new(entries).map_err(CliError::from)?))
    }

    pub fn trainers(&self) -> CliResult<Vec<Box<dyn Trainer>>> {
        if self.method.is_empty() {
            return Err(CliError::usage(
                "the run config lists no methods; add at least one [[method]] section",
            ));
        }
        self.method.iter().map(build_trainer).collect()
    }
}

pub fn build_trainer(method: &MethodConfig) -> CliResult<Box<dyn Trainer>> {
    Ok(match method {
        MethodConfig::Bruteforce { n, tolerance } => {
            let mut config = BruteForceConfig::new(*n);
            if let Some(t) = tolerance {
                config.tolerance = *t;
            }
            config.validate().map_err(CliError::from)?;
            Box::new(BruteForceTrainer(config))
        }
        MethodConfig::Neldermead {
            starts,
            seed,
            max_iterations,
        } => {
            if *starts == Some(0) {
                return Err(CliError::usage("neldermead needs at least one start"));
            }
            if *max_iterations == Some(0) {
                return Err(CliError::usage(
                    "neldermead needs at least one iteration",
                ));
            }
            let mut trainer = NelderMeadTrainer::new(seed.unwrap_or(0));
            trainer.starts = *starts;
            trainer.max_iterations = *max_iterations;
            Box::new(trainer)
        }
        MethodConfig::Logistic {
            learning_rate,
            epochs,
            l2_penalty,
            seed,
            positive_weight,
        } => {
            let mut config = TrainConfig::new(*learning_rate, *epochs, seed.unwrap_or(0));
            if let Some(l2) = l2_penalty {
                config.l2_penalty = *l2;
            }
            if let Some(p) = positive_weight {
                config.positive_weight = *p;
            }
            config.validate().map_err(CliError::from)?;
            Box::new(LogisticTrainer(config))
        }
    })
}

/// The default multi-start configuration, resized to a requested start count.
pub fn nelder_mead_config(
    dimension: usize,
    starts: Option<usize>,
    seed: u64,
    max_iterations: Option<usize>,
) -> CliResult<NelderMeadConfig> {
    let points = match starts {
        Some(k) => seeded_starts(dimension, k, seed).map_err(CliError::from)?,
        None => default_starts(dimension, seed),
    };
    let mut config = NelderMeadConfig::new(points).map_err(CliError::from)?;
    if let Some(m) = max_iterations {
        config.max_iterations = m;
    }
    config.validate().map_err(CliError::from)?;
    Ok(config)
}
