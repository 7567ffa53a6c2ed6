//! Exhaustive search over integer coefficient grids.
//!
//! Every coefficient vector in {0, ..., n}^d is scored by its success rate.
//! Among the candidates within `tolerance` of the best rate, the search
//! returns the simplest rule: minimal coefficient sum, remaining ties broken
//! by the smallest trailing coefficients (the last coefficient compared
//! first). The selection is a total order, so the result does not depend on
//! evaluation order and parallel runs return exactly the sequential answer.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Dataset, Lot};
use crate::scoring::LinearScorer;

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceConfig {
    /// Coefficients range over 0..=n.
    pub n: u32,
    /// Candidates within this much of the best success rate count as
    /// equivalent; the simplest of them wins.
    pub tolerance: f64,
    /// Upper bound on (candidate, lot) evaluations; larger grids are refused.
    pub pair_eval_cap: u128,
}

impl BruteForceConfig {
    pub const DEFAULT_TOLERANCE: f64 = 0.01;
    pub const DEFAULT_PAIR_EVAL_CAP: u128 = 100_000_000;

    pub fn new(n: u32) -> Self {
        Self {
            n,
            tolerance: Self::DEFAULT_TOLERANCE,
            pair_eval_cap: Self::DEFAULT_PAIR_EVAL_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::invalid("n must be at least 1"));
        }
        if !(self.tolerance >= 0.0 && self.tolerance < 1.0) {
            return Err(Error::invalid("tolerance must lie in [0, 1)"));
        }
        if self.pair_eval_cap == 0 {
            return Err(Error::invalid("pair_eval_cap must be positive"));
        }
        Ok(())
    }
}

/// All coefficient vectors of {0..=n}^d in odometer order, last coordinate
/// cycling fastest.
pub fn grid_candidates(n: u32, dimension: usize) -> impl Iterator<Item = Vec<u32>> {
    let base = n as u128 + 1;
    let count = base.checked_pow(dimension as u32).unwrap_or(u128::MAX);
    (0..count).map(move |idx| decode_candidate(idx, n, dimension))
}

fn decode_candidate(mut index: u128, n: u32, dimension: usize) -> Vec<u32> {
    let base = n as u128 + 1;
    let mut coeffs = vec![0u32; dimension];
    for slot in coeffs.iter_mut().rev() {
        *slot = (index % base) as u32;
        index /= base;
    }
    coeffs
}

/// Number of lots whose prime is the strict unique argmax of the integer
/// linear score. Mirrors `predict` + `lot_success` semantics exactly.
fn successes(coeffs: &[f64], lots: &[Lot]) -> usize {
    lots.iter()
        .filter(|lot| {
            let choices = lot.choices();
            let mut best = dot(coeffs, choices[0].features());
            let mut best_index = 0usize;
            let mut tied = false;
            for (i, c) in choices.iter().enumerate().skip(1) {
                let s = dot(coeffs, c.features());
                if s > best {
                    best = s;
                    best_index = i;
                    tied = false;
                } else if s == best {
                    tied = true;
                }
            }
            let predicted = if tied { None } else { Some(best_index) };
            match (lot.prime_index(), predicted) {
                (Some(prime), Some(p)) => prime == p,
                (None, None) => true,
                _ => false,
            }
        })
        .count()
}

fn dot(coeffs: &[f64], features: &[f64]) -> f64 {
    coeffs.iter().zip(features).map(|(a, x)| a * x).sum()
}

/// Selection key: better rate wins the first pass; among qualifiers the
/// minimal coefficient sum wins, then the smallest coefficients compared
/// from the last position backwards.
fn tie_break_key(coeffs: &[u32]) -> (u64, Vec<u32>) {
    let sum: u64 = coeffs.iter().map(|&c| c as u64).sum();
    let mut reversed = coeffs.to_vec();
    reversed.reverse();
    (sum, reversed)
}

/// Exhaustively evaluate {0..=n}^d and return the simplest near-optimal
/// linear scorer together with its success rate on `dataset`.
pub fn brute_force_search(
    dataset: &Dataset,
    config: &BruteForceConfig,
) -> Result<(LinearScorer, f64)> {
    config.validate()?;
    if dataset.lots().is_empty() {
        return Err(Error::invalid("brute-force search on an empty dataset"));
    }
    let dimension = dataset.dimension();
    let base = config.n as u128 + 1;
    let candidates = (0..dimension).try_fold(1u128, |acc, _| acc.checked_mul(base));
    let pair_evals = candidates.and_then(|c| c.checked_mul(dataset.num_lots() as u128));
    let (candidates, pair_evals) = match (candidates, pair_evals) {
        (Some(c), Some(p)) if p <= config.pair_eval_cap => (c, p),
        (c, p) => {
            return Err(Error::ResourceLimit {
                candidates: c.unwrap_or(u128::MAX),
                pair_evals: p.unwrap_or(u128::MAX),
                cap: config.pair_eval_cap,
            })
        }
    };
    let _ = pair_evals;
    let count = candidates as u64;
    let lots = dataset.lots();
    let num_lots = lots.len();

    // Pass 1: the best achievable success count.
    let best_successes = (0..count)
        .into_par_iter()
        .map(|idx| {
            let coeffs = decode_candidate(idx as u128, config.n, dimension);
            let as_f64: Vec<f64> = coeffs.iter().map(|&c| c as f64).collect();
            successes(&as_f64, lots)
        })
        .max()
        .expect("non-empty grid");

    let best_rate = best_successes as f64 / num_lots as f64;
    let threshold = best_rate - config.tolerance;

    // Pass 2: the simplest candidate within tolerance of the best rate.
    let winner = (0..count)
        .into_par_iter()
        .filter_map(|idx| {
            let coeffs = decode_candidate(idx as u128, config.n, dimension);
            let as_f64: Vec<f64> = coeffs.iter().map(|&c| c as f64).collect();
            let s = successes(&as_f64, lots);
            let rate = s as f64 / num_lots as f64;
            if rate >= threshold {
                Some((tie_break_key(&coeffs), coeffs, rate))
            } else {
                None
            }
        })
        .min_by(|a, b| a.0.cmp(&b.0))
        .expect("the best candidate always qualifies");

    let (_, coeffs, rate) = winner;
    let scorer = LinearScorer::new(coeffs.iter().map(|&c| c as f64).collect())?;
    Ok((scorer, rate))
}
