//! Incremental classifiers: the learner contract, Hoeffding bound,
//! Hoeffding tree (HT) and Hoeffding adaptive tree (HAT).

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::stream::Instance;

mod gaussian;
mod tree;

pub use gaussian::GaussianEstimator;
pub use tree::{HoeffdingAdaptiveTree, HoeffdingTree, TreeStats};

/// Dense class identifier, as interned by [`crate::ClassSpace`].
pub type ClassId = usize;

/// A one-pass classifier that can predict at any time.
pub trait IncrementalClassifier: Send {
    /// Updates the model with one labeled instance.
    fn learn_one(&mut self, x: &Instance) -> Result<()>;

    /// Predicts a class. Defined before any training.
    fn predict_one(&self, x: &Instance) -> Result<ClassId>;

    /// Forgets all learned state, keeping hyperparameters.
    fn reset(&mut self);

    /// Estimated model footprint in bytes.
    fn size_bytes(&self) -> usize;

    fn name(&self) -> String;

    fn box_clone(&self) -> Box<dyn IncrementalClassifier>;
}

impl Clone for Box<dyn IncrementalClassifier> {
    fn clone(&self) -> Self {
        self.box_clone()
    }
}

impl<T: IncrementalClassifier + ?Sized> IncrementalClassifier for Box<T> {
    fn learn_one(&mut self, x: &Instance) -> Result<()> {
        (**self).learn_one(x)
    }

    fn predict_one(&self, x: &Instance) -> Result<ClassId> {
        (**self).predict_one(x)
    }

    fn reset(&mut self) {
        (**self).reset()
    }

    fn size_bytes(&self) -> usize {
        (**self).size_bytes()
    }

    fn name(&self) -> String {
        (**self).name()
    }

    fn box_clone(&self) -> Box<dyn IncrementalClassifier> {
        (**self).box_clone()
    }
}

/// `R * sqrt(ln(1/delta) / (2n))`: with probability `1 - delta` the mean of
/// `n` observations of range `R` is within this distance of the true mean.
pub fn hoeffding_bound(range: f64, delta: f64, n: f64) -> f64 {
    debug_assert!(range > 0.0 && delta > 0.0 && delta < 1.0 && n >= 1.0);
    range * ((1.0 / delta).ln() / (2.0 * n)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeafPrediction {
    Majority,
    NaiveBayesAdaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeConfig {
    /// Leaf weight between split attempts.
    pub grace_period: u32,
    pub split_confidence: f64,
    pub tie_threshold: f64,
    pub leaf_prediction: LeafPrediction,
    /// Candidate thresholds evaluated per numeric feature.
    pub split_points: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            grace_period: 200,
            split_confidence: 1e-7,
            tie_threshold: 0.05,
            leaf_prediction: LeafPrediction::NaiveBayesAdaptive,
            split_points: 10,
        }
    }
}

impl TreeConfig {
    pub fn validate(&self) -> Result<()> {
        use crate::error::Error;
        if self.grace_period == 0 {
            return Err(Error::config("grace period must be positive"));
        }
        if !(self.split_confidence > 0.0 && self.split_confidence < 1.0) {
            return Err(Error::config("split confidence must lie in (0, 1)"));
        }
        if self.tie_threshold.is_nan() || self.tie_threshold < 0.0 {
            return Err(Error::config("tie threshold must be non-negative"));
        }
        if self.split_points == 0 {
            return Err(Error::config("need at least one candidate split point"));
        }
        Ok(())
    }
}

/// Predicts the most frequent class seen so far (lowest id on ties).
#[derive(Debug, Clone, Default)]
pub struct MajorityClass {
    counts: Vec<u64>,
    fallback: Option<ClassId>,
}

impl MajorityClass {
    pub fn new() -> Self {
        Self::default()
    }
}

pub(crate) fn argmax(weights: &[f64]) -> Option<ClassId> {
    let mut best: Option<(ClassId, f64)> = None;
    for (c, &w) in weights.iter().enumerate() {
        if best.is_none_or(|(_, b)| w > b) {
            best = Some((c, w));
        }
    }
    best.map(|(c, _)| c)
}

impl IncrementalClassifier for MajorityClass {
    fn learn_one(&mut self, x: &Instance) -> Result<()> {
        let y = x.require_label()?;
        if self.counts.len() <= y {
            self.counts.resize(y + 1, 0);
        }
        self.counts[y] += 1;
        self.fallback.get_or_insert(y);
        Ok(())
    }

    fn predict_one(&self, _x: &Instance) -> Result<ClassId> {
        let weights: Vec<f64> = self.counts.iter().map(|&c| c as f64).collect();
        match argmax(&weights) {
            Some(c) if weights[c] > 0.0 => Ok(c),
            _ => Ok(self.fallback.unwrap_or(0)),
        }
    }

    fn reset(&mut self) {
        self.counts.clear();
    }

    fn size_bytes(&self) -> usize {
        std::mem::size_of::<Self>() + self.counts.len() * 8
    }

    fn name(&self) -> String {
        "majority".into()
    }

    fn box_clone(&self) -> Box<dyn IncrementalClassifier> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn bound_reference_value() {
        assert!((hoeffding_bound(1.0, 0.05, 1000.0) - 0.038707).abs() < 1e-5);
    }

    #[test]
    fn bound_is_linear_in_range() {
        let a = hoeffding_bound(1.0, 0.01, 300.0);
        assert!((hoeffding_bound(2.0, 0.01, 300.0) - 2.0 * a).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn bound_halves_when_n_quadruples(r in 0.1f64..10.0, d in 1e-9f64..0.9, n in 1u32..100_000) {
            let n = f64::from(n);
            prop_assert!((hoeffding_bound(r, d, 4.0 * n) - hoeffding_bound(r, d, n) / 2.0).abs() < 1e-12);
        }

        #[test]
        fn bound_decreases_in_n_and_delta(r in 0.1f64..10.0, d in 1e-9f64..0.5, n in 1u32..100_000) {
            let n = f64::from(n);
            prop_assert!(hoeffding_bound(r, d, n + 1.0) < hoeffding_bound(r, d, n));
            prop_assert!(hoeffding_bound(r, d * 1.5, n) < hoeffding_bound(r, d, n));
        }
    }

    #[test]
    fn majority_counts_and_resets() {
        let mut m = MajorityClass::new();
        let x = |y| Instance::labeled(0, vec![0.0], y).unwrap();
        assert_eq!(m.predict_one(&x(0)).unwrap(), 0);
        m.learn_one(&x(2)).unwrap();
        m.learn_one(&x(1)).unwrap();
        m.learn_one(&x(1)).unwrap();
        assert_eq!(m.predict_one(&x(0)).unwrap(), 1);
        m.reset();
        assert_eq!(m.predict_one(&x(0)).unwrap(), 2);
        assert!(m
            .learn_one(&Instance::new(0, vec![0.0], None).unwrap())
            .is_err());
    }

    #[test]
    fn config_validation() {
        assert!(TreeConfig::default().validate().is_ok());
        let bad = TreeConfig {
            split_confidence: 1.0,
            ..TreeConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
