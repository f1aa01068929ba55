//! Spatio-temporal distance between scaled instances: a linear time-lag
//! term plus the Euclidean distance of the feature vectors.

use crate::error::{Error, Result};
use crate::stream::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceParams {
    /// Time normalizer; the buffer capacity.
    horizon: usize,
}

impl DistanceParams {
    pub fn new(horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::config("distance horizon must be at least 1"));
        }
        Ok(Self { horizon })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }
}

/// `|t - i| / N`.
pub fn time_distance(t: u64, i: u64, params: DistanceParams) -> f64 {
    t.abs_diff(i) as f64 / params.horizon as f64
}

pub fn spatial_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Unweighted sum of the time and spatial terms. Both instances must
/// already be standardized.
pub fn spatio_temporal_distance(
    target: &Instance,
    past: &Instance,
    params: DistanceParams,
) -> Result<f64> {
    let spatial = spatial_distance(&target.features, &past.features)?;
    Ok(time_distance(target.time_index, past.time_index, params) + spatial)
}
