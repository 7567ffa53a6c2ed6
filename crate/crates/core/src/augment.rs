//! Lot-aggregate feature augmentation.
//!
//! Appends per-lot aggregate statistics (min/max/mean of a named feature over
//! the lot) as new features carried identically by every choice of that lot.
//! The appended columns give a point-wise learner access to lot context, so
//! labels become closer to a function of the extended features alone.

use std::collections::HashSet;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{Choice, Dataset, Lot};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregate {
    Min,
    Max,
    Mean,
}

impl Aggregate {
    pub fn apply(&self, values: &[f64]) -> f64 {
        debug_assert!(!values.is_empty());
        match self {
            Aggregate::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
            Aggregate::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Aggregate::Mean => values.iter().sum::<f64>() / values.len() as f64,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Aggregate::Min => "min",
            Aggregate::Max => "max",
            Aggregate::Mean => "mean",
        }
    }
}

impl FromStr for Aggregate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(Aggregate::Min),
            "max" => Ok(Aggregate::Max),
            "mean" => Ok(Aggregate::Mean),
            other => Err(Error::invalid(format!(
                "unknown aggregate `{other}` (expected min, max, or mean)"
            ))),
        }
    }
}

/// One new column: `new_name` = aggregate of `feature` over each lot.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentationEntry {
    pub feature: String,
    pub aggregate: Aggregate,
    pub new_name: String,
}

impl AugmentationEntry {
    /// Entry with the conventional derived name, e.g. `min.f1`.
    pub fn named_after(feature: &str, aggregate: Aggregate) -> Self {
        AugmentationEntry {
            feature: feature.to_string(),
            aggregate,
            new_name: format!("{}.{feature}", aggregate.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AugmentationSpec {
    entries: Vec<AugmentationEntry>,
}

impl AugmentationSpec {
    pub fn new(entries: Vec<AugmentationEntry>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert(e.new_name.as_str()) {
                return Err(Error::schema(format!(
                    "duplicate augmented feature name: {}",
                    e.new_name
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[AugmentationEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Check every referenced feature exists and no new name collides with
    /// the dataset schema.
    pub fn validate(&self, dataset: &Dataset) -> Result<()> {
        for e in &self.entries {
            if dataset.feature_index(&e.feature).is_none() {
                return Err(Error::schema(format!(
                    "augmentation refers to unknown feature: {}",
                    e.feature
                )));
            }
            if dataset.feature_index(&e.new_name).is_some() {
                return Err(Error::schema(format!(
                    "augmented feature name collides with schema: {}",
                    e.new_name
                )));
            }
        }
        Ok(())
    }
}

/// Augmentation resolved against a concrete schema, ready to apply per lot.
#[derive(Debug, Clone)]
pub struct LotAugmenter {
    ops: Vec<(usize, Aggregate)>,
}

impl LotAugmenter {
    pub fn compile(spec: &AugmentationSpec, dataset: &Dataset) -> Result<Self> {
        spec.validate(dataset)?;
        let ops = spec
            .entries
            .iter()
            .map(|e| {
                let idx = dataset
                    .feature_index(&e.feature)
                    .expect("validated feature name");
                (idx, e.aggregate)
            })
            .collect();
        Ok(Self { ops })
    }

    /// The lot with the aggregate columns appended to every choice.
    pub fn augment_lot(&self, lot: &Lot) -> Lot {
        let appended: Vec<f64> = self
            .ops
            .iter()
            .map(|(idx, agg)| {
                let column: Vec<f64> =
                    lot.choices().iter().map(|c| c.features()[*idx]).collect();
                agg.apply(&column)
            })
            .collect();
        let choices = lot
            .choices()
            .iter()
            .map(|c| {
                let mut features = c.features().to_vec();
                features.extend_from_slice(&appended);
                Choice::new(features).expect("augmented features stay finite")
            })
            .collect();
        Lot::new(choices, lot.prime_index()).expect("augmented lot stays valid")
    }
}

/// New dataset with dimension d + |entries|; the original is untouched.
pub fn augment(dataset: &Dataset, spec: &AugmentationSpec) -> Result<Dataset> {
    let augmenter = LotAugmenter::compile(spec, dataset)?;
    let mut names = dataset.feature_names().to_vec();
    names.extend(spec.entries.iter().map(|e| e.new_name.clone()));
    let lots = dataset
        .lots()
        .iter()
        .map(|lot| augmenter.augment_lot(lot))
        .collect();
    Dataset::new(names, lots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lot_of(values: &[(f64, f64)], prime: Option<usize>) -> Lot {
        let choices = values
            .iter()
            .map(|&(a, b)| Choice::new(vec![a, b]).unwrap())
            .collect();
        Lot::new(choices, prime).unwrap()
    }

    fn two_feature_dataset() -> Dataset {
        let lots = vec![
            lot_of(&[(0.4, 0.5), (0.1, 0.8), (0.7, 0.2)], Some(2)),
            lot_of(&[(0.3, 0.3), (0.6, 0.9)], Some(1)),
        ];
        Dataset::new(vec!["f1".into(), "f2".into()], lots).unwrap()
    }

    fn spec(entries: &[(&str, Aggregate)]) -> AugmentationSpec {
        AugmentationSpec::new(
            entries
                .iter()
                .map(|(f, a)| AugmentationEntry::named_after(f, *a))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn min_is_appended_to_every_choice() {
        let ds = two_feature_dataset();
        let out = augment(&ds, &spec(&[("f1", Aggregate::Min)])).unwrap();
        assert_eq!(out.dimension(), 3);
        assert_eq!(out.feature_names()[2], "min.f1");
        for c in out.lots()[0].choices() {
            assert_eq!(c.features()[2], 0.1);
        }
        for c in out.lots()[1].choices() {
            assert_eq!(c.features()[2], 0.3);
        }
    }

    #[test]
    fn max_is_appended_to_every_choice() {
        let ds = two_feature_dataset();
        let out = augment(&ds, &spec(&[("f1", Aggregate::Max)])).unwrap();
        for c in out.lots()[0].choices() {
            assert_eq!(c.features()[2], 0.7);
        }
    }

    #[test]
    fn mean_aggregate() {
        let ds = two_feature_dataset();
        let out = augment(&ds, &spec(&[("f2", Aggregate::Mean)])).unwrap();
        let expected = (0.5 + 0.8 + 0.2) / 3.0;
        for c in out.lots()[0].choices() {
            assert_eq!(c.features()[2], expected);
        }
    }

    #[test]
    fn primes_and_original_columns_are_untouched() {
        let ds = two_feature_dataset();
        let out = augment(&ds, &spec(&[("f1", Aggregate::Min), ("f2", Aggregate::Min)])).unwrap();
        assert_eq!(out.dimension(), 4);
        for (orig, aug) in ds.lots().iter().zip(out.lots()) {
            assert_eq!(orig.prime_index(), aug.prime_index());
            for (oc, ac) in orig.choices().iter().zip(aug.choices()) {
                assert_eq!(oc.features(), &ac.features()[..2]);
            }
        }
    }

    #[test]
    fn unknown_feature_is_a_schema_error() {
        let ds = two_feature_dataset();
        let err = augment(&ds, &spec(&[("nope", Aggregate::Min)])).unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
    }

    #[test]
    fn name_collision_is_a_schema_error() {
        let ds = two_feature_dataset();
        let bad = AugmentationSpec::new(vec![AugmentationEntry {
            feature: "f1".into(),
            aggregate: Aggregate::Min,
            new_name: "f2".into(),
        }])
        .unwrap();
        assert!(matches!(augment(&ds, &bad), Err(Error::Schema(_))));
        assert!(AugmentationSpec::new(vec![
            AugmentationEntry::named_after("f1", Aggregate::Min),
            AugmentationEntry::named_after("f1", Aggregate::Min),
        ])
        .is_err());
    }
}
