//! Learning to pick the single best element of each lot.
//!
//! A *lot* is a finite group of candidate *choices*, at most one of which is
//! marked as the *prime*. The quality of a scoring function is its *success
//! rate*: the fraction of lots on which the choice holding the strict unique
//! maximal score is exactly the prime. Per-choice accuracy and ranking
//! metrics can look excellent while that rate is zero, which is why the
//! success rate is optimized directly here.
//!
//! The crate provides:
//!
//! - the data model and success-rate semantics ([`model`], [`scoring`]),
//! - lot-aggregate feature augmentation ([`augment`]),
//! - a point-wise logistic-regression baseline ([`logistic`]),
//! - exhaustive integer-grid and Nelder-Mead search for linear scorers
//!   maximizing the success rate ([`optimize`]),
//! - leave-one-lot-out evaluation and report assembly ([`eval`]),
//! - a seeded synthetic dataset generator with a planted optimum
//!   ([`datagen`]).

pub mod augment;
pub mod datagen;
pub mod error;
pub mod eval;
pub mod logistic;
pub mod model;
pub mod optimize;
pub mod scoring;

pub use augment::{augment, Aggregate, AugmentationEntry, AugmentationSpec, LotAugmenter};
pub use datagen::{engine_min_augmentation, engine_preset, generate, GenConfig};
pub use error::{Error, Result};
pub use eval::{
    build_report, build_report_mode, leave_one_lot_out, AugmentedTrainer, BruteForceTrainer,
    ConstantTrainer, EvalMode, EvalReport, LogisticTrainer, NelderMeadTrainer, ReportRow,
    Trainer, Variant,
};
pub use logistic::{
    fit_logistic, fit_logistic_traced, initial_model, loss_gradient, regularized_loss,
    LogisticModel, TrainConfig,
};
pub use model::{Choice, Dataset, Lot, Prediction};
pub use optimize::{
    brute_force_search, default_starts, grid_candidates, maximize_success_rate,
    nelder_mead_maximize, seeded_starts, BruteForceConfig, NelderMeadConfig,
};
pub use scoring::{
    indicator, lot_success, lotwise_auc, pointwise_accuracy, predict, predictions,
    success_rate, IndicatorScorer, LinearScorer, Scorer,
};
