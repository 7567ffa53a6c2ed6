//! Evaluation protocol: full-data success rate, leave-one-lot-out
//! cross-validation, and report assembly.
//!
//! The lot is the sampling unit, so cross-validation always holds out whole
//! lots. Folds run in parallel but aggregate in fold order, and every
//! trainer here is deterministic, so reports reproduce bit-for-bit.

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;

use crate::augment::{augment, AugmentationSpec, LotAugmenter};
use crate::error::{Error, Result};
use crate::logistic::{fit_logistic, TrainConfig};
use crate::model::{Dataset, Lot};
use crate::optimize::{
    brute_force_search, default_starts, maximize_success_rate, seeded_starts,
    BruteForceConfig, NelderMeadConfig,
};
use crate::scoring::{lot_success, predict, success_rate, Scorer};

/// A named training procedure mapping a dataset to a scoring function.
///
/// The leave-one-lot-out harness only ever hands a trainer the training
/// split; a trainer has no channel to the held-out lot.
pub trait Trainer: Send + Sync {
    fn name(&self) -> String;
    fn fit(&self, train: &Dataset) -> Result<Arc<dyn Scorer>>;
}

/// Ignores the data and always returns one fixed scorer.
pub struct ConstantTrainer {
    label: String,
    scorer: Arc<dyn Scorer>,
}

impl ConstantTrainer {
    pub fn new(label: impl Into<String>, scorer: Arc<dyn Scorer>) -> Self {
        Self {
            label: label.into(),
            scorer,
        }
    }
}

impl Trainer for ConstantTrainer {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn fit(&self, _train: &Dataset) -> Result<Arc<dyn Scorer>> {
        Ok(self.scorer.clone())
    }
}

pub struct BruteForceTrainer(pub BruteForceConfig);

impl Trainer for BruteForceTrainer {
    fn name(&self) -> String {
        format!("bruteforce(n={})", self.0.n)
    }

    fn fit(&self, train: &Dataset) -> Result<Arc<dyn Scorer>> {
        let (scorer, _) = brute_force_search(train, &self.0)?;
        Ok(Arc::new(scorer))
    }
}

/// Nelder-Mead trainer holding a start recipe rather than concrete points:
/// the starts are materialized for the dimension of whatever dataset it is
/// fitted on, so the same trainer works on original and augmented features.
pub struct NelderMeadTrainer {
    /// Explicit start count; `None` uses the dimension-sized default set.
    pub starts: Option<usize>,
    pub seed: u64,
    pub max_iterations: Option<usize>,
}

impl NelderMeadTrainer {
    pub fn new(seed: u64) -> Self {
        Self {
            starts: None,
            seed,
            max_iterations: None,
        }
    }
}

impl Trainer for NelderMeadTrainer {
    fn name(&self) -> String {
        match self.starts {
            Some(k) => format!("neldermead(starts={k})"),
            None => "neldermead(starts=default)".to_string(),
        }
    }

    fn fit(&self, train: &Dataset) -> Result<Arc<dyn Scorer>> {
        let points = match self.starts {
            Some(k) => seeded_starts(train.dimension(), k, self.seed)?,
            None => default_starts(train.dimension(), self.seed),
        };
        let mut config = NelderMeadConfig::new(points)?;
        if let Some(m) = self.max_iterations {
            config.max_iterations = m;
        }
        let (scorer, _) = maximize_success_rate(train, &config)?;
        Ok(Arc::new(scorer))
    }
}

pub struct LogisticTrainer(pub TrainConfig);

impl Trainer for LogisticTrainer {
    fn name(&self) -> String {
        format!(
            "logistic(lr={},epochs={})",
            self.0.learning_rate, self.0.epochs
        )
    }

    fn fit(&self, train: &Dataset) -> Result<Arc<dyn Scorer>> {
        Ok(Arc::new(fit_logistic(train, &self.0)?))
    }
}

/// Wraps a trainer so it trains and scores in the augmented feature space.
///
/// The aggregates are per-lot statistics, so augmenting inside each fold
/// leaks nothing across lots; the wrapper recomputes them per training split
/// anyway and augments evaluation lots on the fly.
pub struct AugmentedTrainer<T> {
    inner: T,
    spec: AugmentationSpec,
}

impl<T: Trainer> AugmentedTrainer<T> {
    pub fn new(inner: T, spec: AugmentationSpec) -> Self {
        Self { inner, spec }
    }
}

struct AugmentedScorer {
    augmenter: LotAugmenter,
    inner: Arc<dyn Scorer>,
}

impl Scorer for AugmentedScorer {
    fn score_choice(&self, lot: &Lot, index: usize) -> f64 {
        let augmented = self.augmenter.augment_lot(lot);
        self.inner.score_choice(&augmented, index)
    }

    fn score_lot(&self, lot: &Lot) -> Vec<f64> {
        let augmented = self.augmenter.augment_lot(lot);
        self.inner.score_lot(&augmented)
    }
}

impl<T: Trainer> Trainer for AugmentedTrainer<T> {
    fn name(&self) -> String {
        self.inner.name()
    }

    fn fit(&self, train: &Dataset) -> Result<Arc<dyn Scorer>> {
        let augmenter = LotAugmenter::compile(&self.spec, train)?;
        let augmented = augment(train, &self.spec)?;
        let inner = self.inner.fit(&augmented)?;
        Ok(Arc::new(AugmentedScorer { augmenter, inner }))
    }
}

fn fold_err(fold: usize) -> impl FnOnce(Error) -> Error {
    move |e| Error::Fold {
        fold,
        source: Box::new(e),
    }
}

/// Leave-one-lot-out success rate of a trainer: each lot is held out once,
/// the trainer fits on the rest, and the held-out lot scores 0 or 1.
pub fn leave_one_lot_out(trainer: &dyn Trainer, dataset: &Dataset) -> Result<f64> {
    let num_lots = dataset.num_lots();
    if num_lots < 2 {
        return Err(Error::invalid(
            "leave-one-lot-out needs at least 2 lots",
        ));
    }
    let outcomes: Vec<bool> = (0..num_lots)
        .into_par_iter()
        .map(|fold| {
            let train = dataset.without_lot(fold).map_err(fold_err(fold))?;
            let scorer = trainer.fit(&train).map_err(fold_err(fold))?;
            let held_out = &dataset.lots()[fold];
            let scores = scorer.score_lot(held_out);
            if scores.iter().any(|s| !s.is_finite()) {
                return Err(Error::Fold {
                    fold,
                    source: Box::new(Error::NonFiniteScore { lot: fold }),
                });
            }
            let predicted = predict(&scores).map_err(fold_err(fold))?;
            lot_success(held_out, predicted).map_err(fold_err(fold))
        })
        .collect::<Result<_>>()?;
    let successes = outcomes.iter().filter(|s| **s).count();
    Ok(successes as f64 / num_lots as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Original,
    Extended,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Original => write!(f, "original"),
            Variant::Extended => write!(f, "extended"),
        }
    }
}

/// Which rates a report run computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Full,
    Loo,
    Both,
}

impl EvalMode {
    fn wants_full(self) -> bool {
        matches!(self, EvalMode::Full | EvalMode::Both)
    }

    fn wants_loo(self) -> bool {
        matches!(self, EvalMode::Loo | EvalMode::Both)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: String,
    pub variant: Variant,
    pub full_rate: Option<f64>,
    pub loo_rate: Option<f64>,
    pub lots: usize,
    pub choices: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<ReportRow>,
}

fn rate_cell(rate: Option<f64>) -> String {
    match rate {
        Some(r) => format!("{r:.4}"),
        None => "-".to_string(),
    }
}

impl EvalReport {
    /// Aligned plain-text table.
    pub fn to_table(&self) -> String {
        let method_width = self
            .rows
            .iter()
            .map(|r| r.method.len())
            .chain(["method".len()])
            .max()
            .unwrap_or(6);
        let mut out = String::new();
        writeln!(
            out,
            "{:<method_width$}  {:<8}  {:>9}  {:>9}  {:>5}  {:>7}",
            "method", "variant", "full_rate", "loo_rate", "lots", "choices"
        )
        .expect("string write");
        for r in &self.rows {
            writeln!(
                out,
                "{:<method_width$}  {:<8}  {:>9}  {:>9}  {:>5}  {:>7}",
                r.method,
                r.variant.to_string(),
                rate_cell(r.full_rate),
                rate_cell(r.loo_rate),
                r.lots,
                r.choices
            )
            .expect("string write");
        }
        out
    }

    /// Machine-readable rows: one tab-separated line per row.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let full = r
                .full_rate
                .map(|v| v.to_string())
                .unwrap_or_else(|| "-".into());
            let loo = r
                .loo_rate
                .map(|v| v.to_string())
                .unwrap_or_else(|| "-".into());
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                r.method, r.variant, full, loo, r.lots, r.choices
            )
            .expect("string write");
        }
        out
    }
}

fn evaluate_trainer(
    trainer: &dyn Trainer,
    dataset: &Dataset,
    variant: Variant,
    mode: EvalMode,
) -> Result<ReportRow> {
    let full_rate = if mode.wants_full() {
        let scorer = trainer.fit(dataset)?;
        Some(success_rate(scorer.as_ref(), dataset)?)
    } else {
        None
    };
    let loo_rate = if mode.wants_loo() {
        Some(leave_one_lot_out(trainer, dataset)?)
    } else {
        None
    };
    Ok(ReportRow {
        method: trainer.name(),
        variant,
        full_rate,
        loo_rate,
        lots: dataset.num_lots(),
        choices: dataset.num_choices(),
    })
}

/// Rates for every trainer on the original data and, when an augmentation
/// spec is given, on the extended data; rows follow registration order.
pub fn build_report(
    dataset: &Dataset,
    trainers: &[Box<dyn Trainer>],
    spec: Option<&AugmentationSpec>,
) -> Result<EvalReport> {
    build_report_mode(dataset, trainers, spec, EvalMode::Both)
}

pub fn build_report_mode(
    dataset: &Dataset,
    trainers: &[Box<dyn Trainer>],
    spec: Option<&AugmentationSpec>,
    mode: EvalMode,
) -> Result<EvalReport> {
    if trainers.is_empty() {
        return Err(Error::invalid("build_report needs at least one trainer"));
    }
    if let Some(s) = spec {
        s.validate(dataset)?;
    }
    let mut rows = Vec::new();
    for trainer in trainers {
        rows.push(evaluate_trainer(
            trainer.as_ref(),
            dataset,
            Variant::Original,
            mode,
        )?);
        if let Some(s) = spec {
            let wrapped = AugmentedTrainer::new(TrainerRef(trainer.as_ref()), s.clone());
            rows.push(evaluate_trainer(&wrapped, dataset, Variant::Extended, mode)?);
        }
    }
    Ok(EvalReport { rows })
}

/// Borrowed-trainer adapter so the augmentation wrapper can decorate a boxed
/// trainer without taking ownership.
struct TrainerRef<'a>(&'a dyn Trainer);

impl Trainer for TrainerRef<'_> {
    fn name(&self) -> String {
        self.0.name()
    }

    fn fit(&self, train: &Dataset) -> Result<Arc<dyn Scorer>> {
        self.0.fit(train)
    }
}
