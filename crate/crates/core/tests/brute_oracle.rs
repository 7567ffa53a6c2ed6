//! Cross-checks the grid search against a naive enumerator written from the
//! selection rule alone: recursive candidate generation, its own strict
//! argmax, and a straight scan for the simplest near-optimal rule. No code
//! shared with the implementation under test.

use optchoice::{brute_force_search, BruteForceConfig, Dataset, GenConfig};

/// Success rate of one integer candidate, computed from first principles.
fn naive_rate(coeffs: &[u32], dataset: &Dataset) -> f64 {
    let mut hits = 0usize;
    for lot in dataset.lots() {
        let scores: Vec<f64> = lot
            .choices()
            .iter()
            .map(|c| {
                let mut total = 0.0;
                for (j, x) in c.features().iter().enumerate() {
                    total += coeffs[j] as f64 * x;
                }
                total
            })
            .collect();
        let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let winners: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] == top).collect();
        let selected = if winners.len() == 1 {
            Some(winners[0])
        } else {
            None
        };
        let success = match (lot.prime_index(), selected) {
            (Some(p), Some(s)) => p == s,
            (None, None) => true,
            _ => false,
        };
        if success {
            hits += 1;
        }
    }
    hits as f64 / dataset.num_lots() as f64
}

fn all_candidates(n: u32, dimension: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; dimension];
    fill(&mut out, &mut current, 0, n);
    out
}

fn fill(out: &mut Vec<Vec<u32>>, current: &mut Vec<u32>, depth: usize, n: u32) {
    if depth == current.len() {
        out.push(current.clone());
        return;
    }
    for value in 0..=n {
        current[depth] = value;
        fill(out, current, depth + 1, n);
    }
}

/// The documented selection: best rate, then among candidates within
/// `tolerance` of it, minimal coefficient sum, then smallest trailing
/// coefficients (last position compared first).
fn naive_search(dataset: &Dataset, n: u32, tolerance: f64) -> (Vec<u32>, f64) {
    let candidates = all_candidates(n, dataset.dimension());
    let rates: Vec<f64> = candidates
        .iter()
        .map(|c| naive_rate(c, dataset))
        .collect();
    let best = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut winner: Option<(usize, u64)> = None;
    for (i, rate) in rates.iter().enumerate() {
        if *rate < best - tolerance {
            continue;
        }
        let sum: u64 = candidates[i].iter().map(|&c| u64::from(c)).sum();
        let better = match winner {
            None => true,
            Some((w, wsum)) => {
                if sum != wsum {
                    sum < wsum
                } else {
                    let a = &candidates[i];
                    let b = &candidates[w];
                    let mut decision = false;
                    for pos in (0..a.len()).rev() {
                        if a[pos] != b[pos] {
                            decision = a[pos] < b[pos];
                            break;
                        }
                    }
                    decision
                }
            }
        };
        if better {
            winner = Some((i, sum));
        }
    }
    let (index, _) = winner.expect("non-empty grid");
    (candidates[index].clone(), rates[index])
}

fn random_dataset(seed: u64, dimension: usize, lots: usize) -> Dataset {
    let config = GenConfig {
        lots,
        choices_min: 2,
        choices_max: 6,
        dimension,
        binary_feature_index: if dimension >= 2 { Some(dimension - 1) } else { None },
        planted_weights: (0..dimension).map(|i| 1.0 + i as f64).collect(),
        noise_sigma: 0.8,
        prime_probability: 0.85,
        seed,
    };
    optchoice::generate(&config).unwrap()
}

#[test]
fn grid_search_matches_the_naive_enumerator() {
    // Random small instances across dimensions and bounds, all with
    // (n+1)^d <= 10,000.
    let mut checked = 0;
    for seed in 0..30u64 {
        let dimension = 1 + (seed % 3) as usize;
        let n = 2 + (seed % 8) as u32;
        let lots = 3 + (seed % 8) as usize;
        let ds = random_dataset(seed, dimension, lots);
        let config = BruteForceConfig::new(n);
        let (scorer, rate) = brute_force_search(&ds, &config).unwrap();
        let (naive_coeffs, naive_rate) = naive_search(&ds, n, config.tolerance);
        let expected: Vec<f64> = naive_coeffs.iter().map(|&c| c as f64).collect();
        assert_eq!(scorer.coefficients(), expected.as_slice(), "seed {seed}");
        assert_eq!(rate, naive_rate, "seed {seed}");
        checked += 1;
    }
    assert_eq!(checked, 30);
}

#[test]
fn tie_break_soundness() {
    for seed in 100..115u64 {
        let ds = random_dataset(seed, 2, 9);
        let config = BruteForceConfig::new(5);
        let (scorer, rate) = brute_force_search(&ds, &config).unwrap();
        let coeffs: Vec<u32> = scorer.coefficients().iter().map(|&c| c as u32).collect();

        let candidates = all_candidates(5, 2);
        let best = candidates
            .iter()
            .map(|c| naive_rate(c, &ds))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(rate >= best - config.tolerance, "seed {seed}");

        let sum: u64 = coeffs.iter().map(|&c| u64::from(c)).sum();
        for candidate in &candidates {
            let candidate_rate = naive_rate(candidate, &ds);
            if candidate_rate < best - config.tolerance {
                continue;
            }
            let candidate_sum: u64 = candidate.iter().map(|&c| u64::from(c)).sum();
            assert!(candidate_sum >= sum, "seed {seed}: {candidate:?} is simpler");
            if candidate_sum == sum && candidate != &coeffs {
                // Equal sums: the winner must have the smaller trailing
                // coefficients.
                let mut winner_precedes = false;
                for pos in (0..2).rev() {
                    if coeffs[pos] != candidate[pos] {
                        winner_precedes = coeffs[pos] < candidate[pos];
                        break;
                    }
                }
                assert!(winner_precedes, "seed {seed}: {candidate:?} precedes {coeffs:?}");
            }
        }
    }
}
