//! Data model: choices, lots, datasets, and predictions.
//!
//! A choice is a feature vector. A lot is a group of at least two choices of
//! which at most one is marked as the prime. A dataset is a sequence of lots
//! sharing one feature schema. All types are immutable after construction.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// One candidate inside a lot: a fixed-length vector of finite feature values.
#[derive(Debug, Clone, PartialEq)]
pub struct Choice {
    features: Vec<f64>,
}

impl Choice {
    pub fn new(features: Vec<f64>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::invalid("a choice needs at least one feature"));
        }
        if let Some(v) = features.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite feature value: {v}")));
        }
        Ok(Self { features })
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn dimension(&self) -> usize {
        self.features.len()
    }
}

/// A finite group of choices presented together, with at most one prime.
///
/// `prime_index = None` models a lot without a prime: the target labeling is
/// identically zero there, so the correct prediction on such a lot is "no
/// selection".
#[derive(Debug, Clone, PartialEq)]
pub struct Lot {
    choices: Vec<Choice>,
    prime_index: Option<usize>,
}

impl Lot {
    pub fn new(choices: Vec<Choice>, prime_index: Option<usize>) -> Result<Self> {
        if choices.len() < 2 {
            return Err(Error::invalid(format!(
                "a lot needs at least 2 choices, got {}",
                choices.len()
            )));
        }
        let dim = choices[0].dimension();
        if choices.iter().any(|c| c.dimension() != dim) {
            return Err(Error::invalid(
                "all choices in a lot must have the same dimension",
            ));
        }
        if let Some(p) = prime_index {
            if p >= choices.len() {
                return Err(Error::invalid(format!(
                    "prime index {p} out of range for a lot of {} choices",
                    choices.len()
                )));
            }
        }
        Ok(Self {
            choices,
            prime_index,
        })
    }

    pub fn choices(&self) -> &[Choice] {
        &self.choices
    }

    pub fn choice(&self, index: usize) -> &Choice {
        &self.choices[index]
    }

    pub fn prime_index(&self) -> Option<usize> {
        self.prime_index
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.choices[0].dimension()
    }
}

/// A sequence of lots sharing one feature schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    feature_names: Vec<String>,
    lots: Vec<Lot>,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>, lots: Vec<Lot>) -> Result<Self> {
        if feature_names.is_empty() {
            return Err(Error::schema("a dataset needs at least one feature"));
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if name.is_empty() {
                return Err(Error::schema("empty feature name"));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::schema(format!("duplicate feature name: {name}")));
            }
        }
        let dim = feature_names.len();
        for (i, lot) in lots.iter().enumerate() {
            if lot.dimension() != dim {
                return Err(Error::schema(format!(
                    "lot {i} has dimension {}, dataset declares {dim}",
                    lot.dimension()
                )));
            }
        }
        Ok(Self {
            feature_names,
            lots,
        })
    }

    pub fn dimension(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    pub fn lots(&self) -> &[Lot] {
        &self.lots
    }

    pub fn num_lots(&self) -> usize {
        self.lots.len()
    }

    /// Total number of choices pooled over all lots.
    pub fn num_choices(&self) -> usize {
        self.lots.iter().map(Lot::len).sum()
    }

    /// The dataset with lot `index` removed; used by the leave-one-lot-out harness.
    pub fn without_lot(&self, index: usize) -> Result<Dataset> {
        if index >= self.lots.len() {
            return Err(Error::invalid(format!(
                "lot index {index} out of range ({} lots)",
                self.lots.len()
            )));
        }
        let lots = self
            .lots
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != index)
            .map(|(_, l)| l.clone())
            .collect();
        Dataset::new(self.feature_names.clone(), lots)
    }

    /// Apply `f(feature_index, value)` to every feature cell, keeping names
    /// and primes. Used for the orientation transforms (negation, 1-x).
    pub fn map_features<F: Fn(usize, f64) -> f64>(&self, f: F) -> Result<Dataset> {
        let lots = self
            .lots
            .iter()
            .map(|lot| {
                let choices = lot
                    .choices()
                    .iter()
                    .map(|c| {
                        Choice::new(
                            c.features()
                                .iter()
                                .enumerate()
                                .map(|(j, &v)| f(j, v))
                                .collect(),
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                Lot::new(choices, lot.prime_index())
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(self.feature_names.clone(), lots)
    }

    /// Strict validation: every feature value must lie in [0, 1].
    ///
    /// Off by default; the model accepts any finite reals.
    pub fn validate_unit_range(&self) -> Result<()> {
        for (i, lot) in self.lots.iter().enumerate() {
            for c in lot.choices() {
                if let Some(v) = c.features().iter().find(|v| **v < 0.0 || **v > 1.0) {
                    return Err(Error::invalid(format!(
                        "feature value {v} in lot {i} outside [0, 1]"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The outcome of a labeling function on one lot: the selected choice index,
/// or `None` when the function selects nothing there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prediction {
    pub lot_index: usize,
    pub predicted_index: Option<usize>,
}
