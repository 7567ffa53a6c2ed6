//! Scoring functions and the success-rate semantics.
//!
//! A scoring function assigns a real score to every choice of a lot; its
//! induced labeling selects the choice holding the strict unique maximum and
//! selects nothing on ties. The success rate counts the lots on which that
//! labeling exactly reproduces the prime marking. Two diagnostics,
//! [`pointwise_accuracy`] and [`lotwise_auc`], expose how badly per-choice
//! accuracy and ranking metrics can misjudge a scorer that never finds a
//! prime.
//!
//! Ties are exact arithmetic equality. An epsilon band would make the
//! decision depend on the scale of the scores, which would break the
//! invariance of the argmax under positive scaling.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{Dataset, Lot, Prediction};

/// A scoring function g(x, X) on the choices of a lot.
pub trait Scorer: Send + Sync {
    fn score_choice(&self, lot: &Lot, index: usize) -> f64;

    fn score_lot(&self, lot: &Lot) -> Vec<f64> {
        (0..lot.len()).map(|i| self.score_choice(lot, i)).collect()
    }
}

impl<F> Scorer for F
where
    F: Fn(&Lot, usize) -> f64 + Send + Sync,
{
    fn score_choice(&self, lot: &Lot, index: usize) -> f64 {
        self(lot, index)
    }
}

/// Linear scoring function: the dot product of a coefficient vector with the
/// choice's features. No bias term; a constant shift never changes the
/// per-lot argmax.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearScorer {
    coefficients: Vec<f64>,
}

impl LinearScorer {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::invalid("a linear scorer needs coefficients"));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite coefficient"));
        }
        Ok(Self { coefficients })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn score(&self, features: &[f64]) -> f64 {
        debug_assert_eq!(features.len(), self.coefficients.len());
        self.coefficients
            .iter()
            .zip(features)
            .map(|(a, x)| a * x)
            .sum()
    }

    /// Flat text form: one `coef <name> <value>` line per feature, values
    /// printed with 17 significant digits so they reload bit-exactly.
    pub fn to_text(&self, feature_names: &[String]) -> Result<String> {
        if feature_names.len() != self.coefficients.len() {
            return Err(Error::schema(format!(
                "scorer has {} coefficients, schema has {} features",
                self.coefficients.len(),
                feature_names.len()
            )));
        }
        let mut out = String::new();
        for (name, c) in feature_names.iter().zip(&self.coefficients) {
            writeln!(out, "coef {name} {c:.16e}").expect("string write");
        }
        Ok(out)
    }

    /// Parse the flat text form; returns the feature names in file order
    /// alongside the scorer.
    pub fn from_text(text: &str) -> Result<(Vec<String>, LinearScorer)> {
        let mut names = Vec::new();
        let mut coefficients = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some("coef"), Some(name), Some(value), None) => {
                    let v: f64 = value.parse().map_err(|_| {
                        Error::invalid(format!("line {}: bad coefficient {value}", lineno + 1))
                    })?;
                    names.push(name.to_string());
                    coefficients.push(v);
                }
                _ => {
                    return Err(Error::invalid(format!(
                        "line {}: expected `coef <name> <value>`",
                        lineno + 1
                    )))
                }
            }
        }
        Ok((names, LinearScorer::new(coefficients)?))
    }
}

impl Scorer for LinearScorer {
    fn score_choice(&self, lot: &Lot, index: usize) -> f64 {
        self.score(lot.choice(index).features())
    }
}

/// The prime marking itself used as a scorer: 1 on the prime, 0 elsewhere.
/// Achieves success rate 1 on any dataset whose lots all have primes.
#[derive(Debug, Clone, Copy, Default)]
pub struct IndicatorScorer;

impl Scorer for IndicatorScorer {
    fn score_choice(&self, lot: &Lot, index: usize) -> f64 {
        if lot.prime_index() == Some(index) {
            1.0
        } else {
            0.0
        }
    }
}

/// The identity function I(x, X): true iff `index` is the prime of `lot`.
/// On a lot without a prime it is false everywhere.
pub fn indicator(lot: &Lot, index: usize) -> Result<bool> {
    if index >= lot.len() {
        return Err(Error::invalid(format!(
            "choice index {index} out of range for a lot of {} choices",
            lot.len()
        )));
    }
    Ok(lot.prime_index() == Some(index))
}

/// Index of the strict unique maximum of `scores`, or `None` when the maximum
/// is attained at two or more positions.
pub fn predict(scores: &[f64]) -> Result<Option<usize>> {
    if scores.len() < 2 {
        return Err(Error::invalid(format!(
            "predict needs at least 2 scores, got {}",
            scores.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid("non-finite score"));
    }
    let mut best = scores[0];
    let mut best_index = 0;
    let mut tied = false;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > best {
            best = s;
            best_index = i;
            tied = false;
        } else if s == best {
            tied = true;
        }
    }
    Ok(if tied { None } else { Some(best_index) })
}

/// Whether a prediction reproduces the lot's prime marking exactly.
///
/// On a lot with a prime, only predicting that prime succeeds. On a lot
/// without a prime, only predicting nothing succeeds: the target labeling is
/// identically zero there and an empty selection matches it.
pub fn lot_success(lot: &Lot, predicted: Option<usize>) -> Result<bool> {
    if let Some(p) = predicted {
        if p >= lot.len() {
            return Err(Error::invalid(format!(
                "predicted index {p} out of range for a lot of {} choices",
                lot.len()
            )));
        }
    }
    Ok(match (lot.prime_index(), predicted) {
        (Some(prime), Some(p)) => prime == p,
        (None, None) => true,
        _ => false,
    })
}

/// Per-lot predictions of a scorer over a dataset.
pub fn predictions<S: Scorer + ?Sized>(scorer: &S, dataset: &Dataset) -> Result<Vec<Prediction>> {
    dataset
        .lots()
        .iter()
        .enumerate()
        .map(|(lot_index, lot)| {
            let scores = scorer.score_lot(lot);
            if scores.iter().any(|s| !s.is_finite()) {
                return Err(Error::NonFiniteScore { lot: lot_index });
            }
            Ok(Prediction {
                lot_index,
                predicted_index: predict(&scores)?,
            })
        })
        .collect()
}

/// Fraction of lots on which the scorer's induced labeling reproduces the
/// prime marking.
pub fn success_rate<S: Scorer + ?Sized>(scorer: &S, dataset: &Dataset) -> Result<f64> {
    if dataset.lots().is_empty() {
        return Err(Error::invalid("success_rate of an empty dataset"));
    }
    let mut successes = 0usize;
    for (lot_index, lot) in dataset.lots().iter().enumerate() {
        let scores = scorer.score_lot(lot);
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFiniteScore { lot: lot_index });
        }
        if lot_success(lot, predict(&scores)?)? {
            successes += 1;
        }
    }
    Ok(successes as f64 / dataset.num_lots() as f64)
}

/// Per-choice classification accuracy of a set of predictions, pooled over
/// all choices of all lots.
///
/// Each prediction implies a 0/1 label per choice (1 on the predicted index,
/// 0 elsewhere); the accuracy compares those labels against the prime
/// marking. Predicting nothing on k-choice lots that all have primes scores
/// (k-1)/k here while its success rate is 0 — the two metrics measure
/// different things.
pub fn pointwise_accuracy(predictions: &[Prediction], dataset: &Dataset) -> Result<f64> {
    if predictions.len() != dataset.num_lots() {
        return Err(Error::invalid(format!(
            "{} predictions for {} lots",
            predictions.len(),
            dataset.num_lots()
        )));
    }
    let mut correct = 0usize;
    let mut total = 0usize;
    for (i, (pred, lot)) in predictions.iter().zip(dataset.lots()).enumerate() {
        if pred.lot_index != i {
            return Err(Error::invalid(format!(
                "prediction {i} refers to lot {}",
                pred.lot_index
            )));
        }
        if let Some(p) = pred.predicted_index {
            if p >= lot.len() {
                return Err(Error::invalid(format!(
                    "predicted index {p} out of range on lot {i}"
                )));
            }
        }
        for j in 0..lot.len() {
            let label = pred.predicted_index == Some(j);
            if label == indicator(lot, j)? {
                correct += 1;
            }
            total += 1;
        }
    }
    Ok(correct as f64 / total as f64)
}

/// Mean over lots of the fraction of non-prime choices scored strictly below
/// the prime. Requires every lot to have a prime; a score tie between the
/// prime and a non-prime counts 0.5 for that pair.
pub fn lotwise_auc<S: Scorer + ?Sized>(scorer: &S, dataset: &Dataset) -> Result<f64> {
    if dataset.lots().is_empty() {
        return Err(Error::invalid("lotwise_auc of an empty dataset"));
    }
    let mut sum = 0.0;
    for (lot_index, lot) in dataset.lots().iter().enumerate() {
        let prime = lot.prime_index().ok_or_else(|| {
            Error::invalid(format!("lotwise_auc: lot {lot_index} has no prime"))
        })?;
        let scores = scorer.score_lot(lot);
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFiniteScore { lot: lot_index });
        }
        let prime_score = scores[prime];
        let mut credit = 0.0;
        for (j, &s) in scores.iter().enumerate() {
            if j == prime {
                continue;
            }
            if s < prime_score {
                credit += 1.0;
            } else if s == prime_score {
                credit += 0.5;
            }
        }
        sum += credit / (lot.len() - 1) as f64;
    }
    Ok(sum / dataset.num_lots() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Choice;

    fn lot(features: &[f64], prime: Option<usize>) -> Lot {
        let choices = features
            .iter()
            .map(|&v| Choice::new(vec![v]).unwrap())
            .collect();
        Lot::new(choices, prime).unwrap()
    }

    fn dataset(lots: Vec<Lot>) -> Dataset {
        Dataset::new(vec!["f1".into()], lots).unwrap()
    }

    /// Scores each choice by its single feature.
    fn feature_scorer() -> LinearScorer {
        LinearScorer::new(vec![1.0]).unwrap()
    }

    #[test]
    fn indicator_definition() {
        let l = lot(&[0.1, 0.2, 0.3], Some(2));
        assert!(indicator(&l, 2).unwrap());
        assert!(!indicator(&l, 0).unwrap());
        let unprimed = lot(&[0.1, 0.2, 0.3], None);
        for i in 0..3 {
            assert!(!indicator(&unprimed, i).unwrap());
        }
        assert!(indicator(&l, 3).is_err());
    }

    #[test]
    fn predict_unique_maximum() {
        assert_eq!(predict(&[0.2, 0.9, 0.5]).unwrap(), Some(1));
    }

    #[test]
    fn predict_tied_maximum_is_empty() {
        assert_eq!(predict(&[0.7, 0.7, 0.1]).unwrap(), None);
        assert_eq!(predict(&[0.0, 0.0, 0.0]).unwrap(), None);
    }

    #[test]
    fn predict_rejects_short_or_non_finite_input() {
        assert!(predict(&[]).is_err());
        assert!(predict(&[1.0]).is_err());
        assert!(predict(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn lot_success_cases() {
        let primed = lot(&[0.1, 0.2], Some(1));
        assert!(lot_success(&primed, Some(1)).unwrap());
        assert!(!lot_success(&primed, Some(0)).unwrap());
        assert!(!lot_success(&primed, None).unwrap());
        let unprimed = lot(&[0.1, 0.2], None);
        assert!(lot_success(&unprimed, None).unwrap());
        assert!(!lot_success(&unprimed, Some(0)).unwrap());
        assert!(lot_success(&primed, Some(5)).is_err());
    }

    #[test]
    fn success_rate_of_indicator_is_one() {
        let ds = dataset((0..5).map(|i| lot(&[0.1, 0.9, 0.5], Some(i % 3))).collect());
        assert_eq!(success_rate(&IndicatorScorer, &ds).unwrap(), 1.0);
    }

    #[test]
    fn success_rate_of_constant_scorer_is_zero_on_primed_lots() {
        let ds = dataset((0..4).map(|_| lot(&[0.1, 0.9], Some(0))).collect());
        let constant = |_: &Lot, _: usize| 0.0;
        assert_eq!(success_rate(&constant, &ds).unwrap(), 0.0);
    }

    #[test]
    fn success_rate_zero_when_prime_ranked_second() {
        // Prime holds the second-highest feature value in each of 10 lots.
        let lots = (0..10)
            .map(|_| lot(&[0.9, 0.8, 0.1, 0.2], Some(1)))
            .collect();
        let ds = dataset(lots);
        assert_eq!(success_rate(&feature_scorer(), &ds).unwrap(), 0.0);
    }

    #[test]
    fn success_rate_requires_lots() {
        let ds = dataset(vec![lot(&[0.0, 1.0], Some(1))]);
        let empty = Dataset::new(vec!["f1".into()], vec![]).unwrap();
        assert!(success_rate(&feature_scorer(), &empty).is_err());
        assert_eq!(success_rate(&feature_scorer(), &ds).unwrap(), 1.0);
    }

    #[test]
    fn success_rate_reports_non_finite_scores() {
        let ds = dataset(vec![
            lot(&[0.0, 1.0], Some(1)),
            lot(&[0.5, 0.6], Some(1)),
        ]);
        let bad = |l: &Lot, i: usize| {
            if l.choice(i).features()[0] == 0.5 {
                f64::NAN
            } else {
                0.0
            }
        };
        match success_rate(&bad, &ds) {
            Err(Error::NonFiniteScore { lot }) => assert_eq!(lot, 1),
            other => panic!("expected NonFiniteScore, got {other:?}"),
        }
    }

    #[test]
    fn pointwise_accuracy_of_empty_predictions() {
        let ds = dataset((0..3).map(|_| lot(&[0.0; 10], Some(0))).collect());
        let preds: Vec<Prediction> = (0..3)
            .map(|i| Prediction {
                lot_index: i,
                predicted_index: None,
            })
            .collect();
        assert_eq!(pointwise_accuracy(&preds, &ds).unwrap(), 0.9);

        let ds4 = dataset((0..3).map(|_| lot(&[0.0; 4], Some(0))).collect());
        assert_eq!(pointwise_accuracy(&preds, &ds4).unwrap(), 0.75);
    }

    #[test]
    fn pointwise_accuracy_of_perfect_predictions() {
        let ds = dataset((0..3).map(|i| lot(&[0.0; 5], Some(i))).collect());
        let preds: Vec<Prediction> = (0..3)
            .map(|i| Prediction {
                lot_index: i,
                predicted_index: Some(i),
            })
            .collect();
        assert_eq!(pointwise_accuracy(&preds, &ds).unwrap(), 1.0);
    }

    #[test]
    fn pointwise_accuracy_checks_lengths() {
        let ds = dataset(vec![lot(&[0.0, 1.0], Some(1))]);
        assert!(pointwise_accuracy(&[], &ds).is_err());
    }

    #[test]
    fn lotwise_auc_prime_ranked_second() {
        let mut features = vec![0.95];
        features.extend((0..9).map(|i| 0.9 - i as f64 * 0.1));
        // Index 1 (value 0.9) is the prime; index 0 outranks it.
        let lots = (0..7).map(|_| lot(&features, Some(1))).collect();
        let ds = dataset(lots);
        let auc = lotwise_auc(&feature_scorer(), &ds).unwrap();
        assert!((auc - 8.0 / 9.0).abs() < 1e-12);
        assert_eq!(success_rate(&feature_scorer(), &ds).unwrap(), 0.0);
    }

    #[test]
    fn lotwise_auc_extremes() {
        let top: Vec<f64> = (0..10).map(|i| 1.0 - i as f64 * 0.05).collect();
        let ds_top = dataset((0..4).map(|_| lot(&top, Some(0))).collect());
        assert_eq!(lotwise_auc(&feature_scorer(), &ds_top).unwrap(), 1.0);
        let ds_bottom = dataset((0..4).map(|_| lot(&top, Some(9))).collect());
        assert_eq!(lotwise_auc(&feature_scorer(), &ds_bottom).unwrap(), 0.0);
    }

    #[test]
    fn lotwise_auc_requires_primes() {
        let ds = dataset(vec![lot(&[0.1, 0.2], None)]);
        assert!(lotwise_auc(&feature_scorer(), &ds).is_err());
    }

    #[test]
    fn lotwise_auc_counts_ties_as_half() {
        let ds = dataset(vec![lot(&[0.5, 0.5, 0.1], Some(0))]);
        assert_eq!(lotwise_auc(&feature_scorer(), &ds).unwrap(), 0.75);
    }

    #[test]
    fn scorer_text_round_trip() {
        let s = LinearScorer::new(vec![1.5, -0.25, 1.0 / 3.0]).unwrap();
        let names: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let text = s.to_text(&names).unwrap();
        let (parsed_names, parsed) = LinearScorer::from_text(&text).unwrap();
        assert_eq!(parsed_names, names);
        assert_eq!(parsed, s);
    }

    #[test]
    fn scorer_text_rejects_garbage() {
        assert!(LinearScorer::from_text("coef a not_a_number").is_err());
        assert!(LinearScorer::from_text("weight a 1.0").is_err());
    }
}
