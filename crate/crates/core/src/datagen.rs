//! Seeded generator of synthetic optimal-choice datasets.
//!
//! Lots are drawn independently; within a lot, each choice gets i.i.d.
//! uniform features (one column optionally Bernoulli), and the prime is the
//! argmax of a planted linear utility plus Gaussian noise. With zero noise
//! the planted weights recover every prime exactly, which gives the test
//! suites a known-optimal ground truth.
//!
//! Generation is a single seeded stream: identical configs produce
//! bit-identical datasets.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::augment::{Aggregate, AugmentationEntry, AugmentationSpec};
use crate::error::{Error, Result};
use crate::model::{Choice, Dataset, Lot};

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub lots: usize,
    pub choices_min: usize,
    pub choices_max: usize,
    pub dimension: usize,
    /// Column drawn as Bernoulli(0.5) in {0, 1} instead of uniform [0, 1).
    pub binary_feature_index: Option<usize>,
    /// Utility weights defining the prime; larger utility is better.
    pub planted_weights: Vec<f64>,
    /// Standard deviation of the Gaussian utility noise.
    pub noise_sigma: f64,
    /// Probability that a lot has a prime at all.
    pub prime_probability: f64,
    pub seed: u64,
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lots == 0 {
            return Err(Error::invalid("lots must be at least 1"));
        }
        if self.choices_min < 2 || self.choices_min > self.choices_max {
            return Err(Error::invalid(
                "need 2 <= choices_min <= choices_max",
            ));
        }
        if self.dimension == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if let Some(b) = self.binary_feature_index {
            if b >= self.dimension {
                return Err(Error::invalid(format!(
                    "binary feature index {b} out of range for dimension {}",
                    self.dimension
                )));
            }
        }
        if self.planted_weights.len() != self.dimension {
            return Err(Error::invalid(format!(
                "planted_weights has length {}, dimension is {}",
                self.planted_weights.len(),
                self.dimension
            )));
        }
        if self.planted_weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("non-finite planted weight"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::invalid("noise_sigma must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.prime_probability) {
            return Err(Error::invalid("prime_probability must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// The engine-shaped preset: 114 lots of 2..=40 choices, four features with
/// the last one binary, integer planted weights, mild utility noise.
pub fn engine_preset() -> GenConfig {
    GenConfig {
        lots: 114,
        choices_min: 2,
        choices_max: 40,
        dimension: 4,
        binary_feature_index: Some(3),
        planted_weights: vec![5.0, 3.0, 2.0, 1.0],
        noise_sigma: 0.15,
        prime_probability: 1.0,
        seed: 42,
    }
}

/// The lot-minimum augmentation conventionally paired with the engine
/// preset: min.f1 and min.f2 over the two leading continuous features.
pub fn engine_min_augmentation() -> AugmentationSpec {
    AugmentationSpec::new(vec![
        AugmentationEntry::named_after("f1", Aggregate::Min),
        AugmentationEntry::named_after("f2", Aggregate::Min),
    ])
    .expect("distinct names")
}

fn draw_features(rng: &mut ChaCha8Rng, config: &GenConfig, size: usize) -> Vec<Vec<f64>> {
    (0..size)
        .map(|_| {
            (0..config.dimension)
                .map(|j| {
                    if config.binary_feature_index == Some(j) {
                        f64::from(rng.random_range(0..2u32))
                    } else {
                        rng.random_range(0.0..1.0)
                    }
                })
                .collect()
        })
        .collect()
}

fn strict_argmax(values: &[f64]) -> Option<usize> {
    let mut best = values[0];
    let mut best_index = 0;
    let mut tied = false;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > best {
            best = v;
            best_index = i;
            tied = false;
        } else if v == best {
            tied = true;
        }
    }
    if tied {
        None
    } else {
        Some(best_index)
    }
}

/// Draw a dataset according to `config`. Deterministic in the seed.
pub fn generate(config: &GenConfig) -> Result<Dataset> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let noise = if config.noise_sigma > 0.0 {
        Some(Normal::new(0.0, config.noise_sigma).expect("valid sigma"))
    } else {
        None
    };

    let mut lots = Vec::with_capacity(config.lots);
    for _ in 0..config.lots {
        let size = rng.random_range(config.choices_min..=config.choices_max);
        let mut features = draw_features(&mut rng, config, size);
        let has_prime = rng.random_range(0.0..1.0) < config.prime_probability;

        let prime = if has_prime {
            loop {
                let utilities: Vec<f64> = features
                    .iter()
                    .map(|x| {
                        let base: f64 = config
                            .planted_weights
                            .iter()
                            .zip(x)
                            .map(|(w, v)| w * v)
                            .sum();
                        match &noise {
                            Some(n) => base + n.sample(&mut rng),
                            None => base,
                        }
                    })
                    .collect();
                if let Some(argmax) = strict_argmax(&utilities) {
                    break Some(argmax);
                }
                // Exact utility tie. With noise, redrawing the noise is
                // enough; without it the tied feature rows themselves must
                // be re-sampled.
                if noise.is_none() {
                    features = draw_features(&mut rng, config, size);
                }
            }
        } else {
            None
        };

        let choices = features
            .into_iter()
            .map(|f| Choice::new(f).expect("generated features are finite"))
            .collect();
        lots.push(Lot::new(choices, prime).expect("generated lot is valid"));
    }

    let names = (1..=config.dimension).map(|i| format!("f{i}")).collect();
    Dataset::new(names, lots)
}
