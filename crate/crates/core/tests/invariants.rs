//! Property suites for the argmax semantics, augmentation, and the
//! scale-invariance of the success rate.

use proptest::prelude::*;

use optchoice::{
    augment, lotwise_auc, pointwise_accuracy, predict, success_rate, Aggregate,
    AugmentationEntry, AugmentationSpec, Choice, Dataset, GenConfig, LinearScorer, Lot,
    Prediction,
};

fn scores_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, 2..12)
}

fn permutation(len: usize, seed: u64) -> Vec<usize> {
    // Simple seeded Fisher-Yates; proptest drives the seed.
    let mut perm: Vec<usize> = (0..len).collect();
    let mut state = seed | 1;
    for i in (1..len).rev() {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let j = (state >> 33) as usize % (i + 1);
        perm.swap(i, j);
    }
    perm
}

proptest! {
    #[test]
    fn predict_is_permutation_equivariant(scores in scores_strategy(), seed in any::<u64>()) {
        let perm = permutation(scores.len(), seed);
        let permuted: Vec<f64> = perm.iter().map(|&i| scores[i]).collect();
        let base = predict(&scores).unwrap();
        let moved = predict(&permuted).unwrap();
        match base {
            None => prop_assert_eq!(moved, None),
            Some(idx) => {
                let expected = perm.iter().position(|&i| i == idx).unwrap();
                prop_assert_eq!(moved, Some(expected));
            }
        }
    }

    #[test]
    fn predict_ignores_strictly_increasing_transforms(scores in scores_strategy()) {
        let base = predict(&scores).unwrap();
        let transforms: [fn(f64) -> f64; 3] = [
            |x| 2.0 * x + 1.0,
            |x| x.powi(3),
            |x| x.atan(),
        ];
        for h in transforms {
            let mapped: Vec<f64> = scores.iter().map(|&s| h(s)).collect();
            prop_assert_eq!(predict(&mapped).unwrap(), base);
        }
    }
}

fn random_dataset(seed: u64, dimension: usize, primeless: bool) -> Dataset {
    let config = GenConfig {
        lots: 12,
        choices_min: 2,
        choices_max: 7,
        dimension,
        binary_feature_index: None,
        planted_weights: vec![1.0; dimension],
        noise_sigma: 0.5,
        prime_probability: if primeless { 0.6 } else { 1.0 },
        seed,
    };
    optchoice::generate(&config).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn success_rate_is_invariant_under_positive_scaling(
        seed in any::<u64>(),
        coeffs in prop::collection::vec(-3.0f64..3.0, 3),
    ) {
        let ds = random_dataset(seed, 3, true);
        let base = LinearScorer::new(coeffs.clone()).unwrap();
        let rate = success_rate(&base, &ds).unwrap();
        for lambda in [0.5, 2.0, 10.0] {
            let scaled = LinearScorer::new(coeffs.iter().map(|c| c * lambda).collect()).unwrap();
            prop_assert_eq!(success_rate(&scaled, &ds).unwrap(), rate);
        }
    }

    #[test]
    fn success_rate_depends_only_on_the_argmax(
        seed in any::<u64>(),
        coeffs in prop::collection::vec(-3.0f64..3.0, 3),
    ) {
        // A strictly increasing transform of the scores induces the same
        // labeling, hence the same rate.
        let ds = random_dataset(seed, 3, true);
        let base = LinearScorer::new(coeffs.clone()).unwrap();
        let transformed = {
            let inner = base.clone();
            move |lot: &Lot, i: usize| {
                use optchoice::Scorer;
                inner.score_choice(lot, i).atan() * 3.0 + 1.0
            }
        };
        prop_assert_eq!(
            success_rate(&transformed, &ds).unwrap(),
            success_rate(&base, &ds).unwrap()
        );
    }
}

#[test]
fn accuracy_vs_success_separation_for_all_lot_sizes() {
    // Predicting nothing scores (k-1)/k on per-choice accuracy but 0 on
    // success rate, for every lot size k.
    for k in 2..=20usize {
        let lots: Vec<Lot> = (0..5)
            .map(|_| {
                let choices = (0..k)
                    .map(|j| Choice::new(vec![j as f64 / k as f64]).unwrap())
                    .collect();
                Lot::new(choices, Some(0)).unwrap()
            })
            .collect();
        let ds = Dataset::new(vec!["f1".into()], lots).unwrap();
        let empty: Vec<Prediction> = (0..5)
            .map(|i| Prediction {
                lot_index: i,
                predicted_index: None,
            })
            .collect();
        let accuracy = pointwise_accuracy(&empty, &ds).unwrap();
        assert_eq!(accuracy, (k - 1) as f64 / k as f64, "k={k}");
        let constant = LinearScorer::new(vec![0.0]).unwrap();
        assert_eq!(success_rate(&constant, &ds).unwrap(), 0.0, "k={k}");
    }
}

#[test]
fn lotwise_auc_matches_the_rank_formula() {
    // Prime at 1-based rank r (no ties) in k-choice lots gives (k-r)/(k-1).
    for k in 2..=10usize {
        for r in 1..=k {
            let values: Vec<f64> = (0..k).map(|j| 1.0 - j as f64 / k as f64).collect();
            let lots: Vec<Lot> = (0..3)
                .map(|_| {
                    let choices = values
                        .iter()
                        .map(|&v| Choice::new(vec![v]).unwrap())
                        .collect();
                    Lot::new(choices, Some(r - 1)).unwrap()
                })
                .collect();
            let ds = Dataset::new(vec!["f1".into()], lots).unwrap();
            let scorer = LinearScorer::new(vec![1.0]).unwrap();
            let auc = lotwise_auc(&scorer, &ds).unwrap();
            let expected = (k - r) as f64 / (k - 1) as f64;
            assert!((auc - expected).abs() < 1e-12, "k={k} r={r}: {auc} vs {expected}");
        }
    }
}

fn augmentation_spec() -> AugmentationSpec {
    AugmentationSpec::new(vec![
        AugmentationEntry::named_after("f1", Aggregate::Min),
        AugmentationEntry::named_after("f2", Aggregate::Max),
        AugmentationEntry::named_after("f3", Aggregate::Mean),
    ])
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn augmented_columns_are_lot_constant_and_attained(seed in any::<u64>()) {
        let ds = random_dataset(seed, 3, true);
        let out = augment(&ds, &augmentation_spec()).unwrap();
        prop_assert_eq!(out.dimension(), 6);
        for lot in out.lots() {
            let first = lot.choices()[0].features();
            let (min_col, max_col) = (first[3], first[4]);
            for c in lot.choices() {
                // Lot-constant: exactly equal across the lot's choices.
                prop_assert_eq!(c.features()[3], min_col);
                prop_assert_eq!(c.features()[4], max_col);
                prop_assert_eq!(c.features()[5], first[5]);
            }
            // Min and max are attained by some choice of the lot.
            prop_assert!(lot.choices().iter().any(|c| c.features()[0] == min_col));
            prop_assert!(lot.choices().iter().any(|c| c.features()[1] == max_col));
        }
    }

    #[test]
    fn augmentation_projects_back_to_the_input(seed in any::<u64>()) {
        let ds = random_dataset(seed, 3, true);
        let out = augment(&ds, &augmentation_spec()).unwrap();
        let projected = Dataset::new(
            ds.feature_names().to_vec(),
            out.lots()
                .iter()
                .map(|lot| {
                    let choices = lot
                        .choices()
                        .iter()
                        .map(|c| Choice::new(c.features()[..3].to_vec()).unwrap())
                        .collect();
                    Lot::new(choices, lot.prime_index()).unwrap()
                })
                .collect(),
        )
        .unwrap();
        prop_assert_eq!(projected, ds);
    }

    #[test]
    fn augmentation_commutes_with_lot_permutation(seed in any::<u64>(), perm_seed in any::<u64>()) {
        let ds = random_dataset(seed, 3, true);
        let spec = augmentation_spec();
        let perm = permutation(ds.num_lots(), perm_seed);
        let shuffled = Dataset::new(
            ds.feature_names().to_vec(),
            perm.iter().map(|&i| ds.lots()[i].clone()).collect(),
        )
        .unwrap();
        let augmented_then_shuffled = {
            let aug = augment(&ds, &spec).unwrap();
            Dataset::new(
                aug.feature_names().to_vec(),
                perm.iter().map(|&i| aug.lots()[i].clone()).collect(),
            )
            .unwrap()
        };
        let shuffled_then_augmented = augment(&shuffled, &spec).unwrap();
        prop_assert_eq!(augmented_then_shuffled, shuffled_then_augmented);
    }
}

#[test]
fn gradient_matches_central_finite_differences_at_random_points() {
    use optchoice::{loss_gradient, regularized_loss};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    let ds = random_dataset(7, 3, false);
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    let h = 1e-6;
    let l2 = 0.1;
    for _ in 0..20 {
        let weights: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
        let bias: f64 = rng.random_range(-2.0..2.0);
        let (gw, gb) = loss_gradient(&ds, &weights, bias, l2, 1.0).unwrap();

        let mut fd = Vec::new();
        for j in 0..3 {
            let mut plus = weights.clone();
            let mut minus = weights.clone();
            plus[j] += h;
            minus[j] -= h;
            fd.push(
                (regularized_loss(&ds, &plus, bias, l2, 1.0).unwrap()
                    - regularized_loss(&ds, &minus, bias, l2, 1.0).unwrap())
                    / (2.0 * h),
            );
        }
        fd.push(
            (regularized_loss(&ds, &weights, bias + h, l2, 1.0).unwrap()
                - regularized_loss(&ds, &weights, bias - h, l2, 1.0).unwrap())
                / (2.0 * h),
        );

        let analytic: Vec<f64> = gw.iter().copied().chain([gb]).collect();
        let diff: f64 = analytic
            .iter()
            .zip(&fd)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let scale: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt()
            + fd.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(
            diff / scale.max(1e-12) < 1e-5,
            "relative gradient error {} at {:?}",
            diff / scale.max(1e-12),
            (weights, bias)
        );
    }
}
