//! Incremental per-feature standardization.
//!
//! Running mean and population variance are kept with Welford's
//! recurrence. Each instance is standardized with the statistics available
//! when it arrives; nothing is rescaled retroactively.

use crate::error::{Error, Result};
use crate::stream::Instance;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunningScaler {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl RunningScaler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Scaler with known moments, mostly useful for tests.
    pub fn from_moments(count: u64, mean: Vec<f64>, variance: &[f64]) -> Self {
        assert_eq!(mean.len(), variance.len());
        let m2 = variance.iter().map(|v| v * count as f64).collect();
        Self { count, mean, m2 }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn dimension(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Population variance per feature.
    pub fn variance(&self) -> Vec<f64> {
        if self.count == 0 {
            return vec![0.0; self.mean.len()];
        }
        let n = self.count as f64;
        self.m2.iter().map(|m2| (m2 / n).max(0.0)).collect()
    }

    pub fn std(&self) -> Vec<f64> {
        self.variance().into_iter().map(f64::sqrt).collect()
    }

    pub fn update(&mut self, x: &Instance) -> Result<()> {
        self.update_values(&x.features)
    }

    pub fn update_values(&mut self, values: &[f64]) -> Result<()> {
        if self.count == 0 && self.mean.is_empty() {
            self.mean = vec![0.0; values.len()];
            self.m2 = vec![0.0; values.len()];
        } else if values.len() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                found: values.len(),
            });
        }
        self.count += 1;
        let n = self.count as f64;
        for ((mean, m2), &v) in self.mean.iter_mut().zip(&mut self.m2).zip(values) {
            let delta = v - *mean;
            *mean += delta / n;
            *m2 += delta * (v - *mean);
        }
        Ok(())
    }

    /// Standardizes `x`; zero-variance features map to 0.
    pub fn transform(&self, x: &Instance) -> Result<Instance> {
        Ok(x.with_features(self.transform_values(&x.features)?))
    }

    pub fn transform_values(&self, values: &[f64]) -> Result<Vec<f64>> {
        if self.count == 0 {
            return Err(Error::EmptyScaler);
        }
        if values.len() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                found: values.len(),
            });
        }
        let n = self.count as f64;
        Ok(values
            .iter()
            .zip(&self.mean)
            .zip(&self.m2)
            .map(|((&v, &mean), &m2)| {
                let std = (m2 / n).max(0.0).sqrt();
                if std > 0.0 {
                    (v - mean) / std
                } else {
                    0.0
                }
            })
            .collect())
    }

    /// Keeps the statistics of the given feature positions only.
    pub fn restrict(&mut self, positions: &[usize]) -> Result<()> {
        if let Some(&p) = positions.iter().find(|&&p| p >= self.mean.len()) {
            return Err(Error::MissingFeature {
                position: p,
                dimension: self.mean.len(),
            });
        }
        self.mean = positions.iter().map(|&p| self.mean[p]).collect();
        self.m2 = positions.iter().map(|&p| self.m2[p]).collect();
        Ok(())
    }

    /// Approximate heap footprint in bytes.
    pub fn size_bytes(&self) -> usize {
        std::mem::size_of::<Self>() + 2 * self.mean.len() * std::mem::size_of::<f64>()
    }
}
