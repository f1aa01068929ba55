//! Similarity-based instance selection.
//!
//! After each instance has been tested, the learner is reset and retrained
//! from the buffer of recent instances, visiting them from most to least
//! similar to that instance. Training stops at the smallest window whose
//! error on the `k` most recent instances is below the threshold, searching
//! only within `radius` of the previous best window size.

use serde::{Deserialize, Serialize};

use crate::distance::DistanceParams;
use crate::error::{Error, Result};
use crate::hoeffding::IncrementalClassifier;
use crate::stream::Instance;

mod buffer;
mod ranking;
mod window;

pub use buffer::RecentBuffer;
pub use ranking::{objective, reorder, Ranking};
pub use window::{optimal_window_train, search_limits, WindowOutcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SisConfig {
    /// Buffer capacity `N`; also the time-distance normalizer.
    pub capacity: usize,
    /// Trial set size `k`.
    pub trial_k: usize,
    /// Search radius `r` around the previous best window size.
    pub radius: usize,
    /// Accept a window when its trial error is strictly below this.
    pub error_threshold: f64,
    /// Previous best window size `b`.
    pub prev_best: usize,
}

impl Default for SisConfig {
    fn default() -> Self {
        Self::new(200, 1, 10, 0.1)
    }
}

impl SisConfig {
    /// Starts the search at `b = min(N, max(1, r))`.
    pub fn new(capacity: usize, trial_k: usize, radius: usize, error_threshold: f64) -> Self {
        Self {
            capacity,
            trial_k,
            radius,
            error_threshold,
            prev_best: capacity.min(radius.max(1)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.capacity == 0 {
            return Err(Error::config("SIS capacity N must be at least 1"));
        }
        if self.trial_k == 0 || self.trial_k > self.capacity {
            return Err(Error::config("SIS trial size k must lie in [1, N]"));
        }
        if self.radius == 0 {
            return Err(Error::config("SIS radius r must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.error_threshold) {
            return Err(Error::config("SIS error threshold must lie in [0, 1]"));
        }
        if self.prev_best == 0 || self.prev_best > self.capacity {
            return Err(Error::config("previous best window must lie in [1, N]"));
        }
        Ok(())
    }

    pub fn distance_params(&self) -> Result<DistanceParams> {
        DistanceParams::new(self.capacity)
    }
}

/// What one training step did.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepSummary {
    pub window: WindowOutcome,
    /// Distance comparisons spent ranking the buffer.
    pub comparisons: u64,
    /// Buffer size before the target was added.
    pub buffered: usize,
}

/// Resize, rank, reset, search; then buffer the target.
pub fn sis_train_step(
    learner: &mut dyn IncrementalClassifier,
    buffer: &mut RecentBuffer,
    target: &Instance,
    cfg: &mut SisConfig,
    params: DistanceParams,
) -> Result<StepSummary> {
    target.require_label()?;
    buffer.resize_to_target(target)?;
    learner.reset();
    let mut summary = StepSummary {
        buffered: buffer.len(),
        ..StepSummary::default()
    };
    if !buffer.is_empty() {
        let ranking = reorder(buffer, target, params)?;
        summary.comparisons = ranking.comparisons;
        summary.window = optimal_window_train(learner, buffer, &ranking, cfg)?;
        cfg.prev_best = summary.window.best;
    } else {
        summary.window.best = cfg.prev_best;
    }
    buffer.push(target.clone())?;
    Ok(summary)
}

/// Per-stream SIS state: configuration, distance parameters and buffer.
#[derive(Debug, Clone)]
pub struct SisEngine {
    cfg: SisConfig,
    params: DistanceParams,
    buffer: RecentBuffer,
}

impl SisEngine {
    pub fn new(cfg: SisConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            params: cfg.distance_params()?,
            buffer: RecentBuffer::new(cfg.capacity),
            cfg,
        })
    }

    pub fn config(&self) -> &SisConfig {
        &self.cfg
    }

    pub fn buffer(&self) -> &RecentBuffer {
        &self.buffer
    }

    pub fn train_step(
        &mut self,
        learner: &mut dyn IncrementalClassifier,
        target: &Instance,
    ) -> Result<StepSummary> {
        sis_train_step(
            learner,
            &mut self.buffer,
            target,
            &mut self.cfg,
            self.params,
        )
    }

    pub fn size_bytes(&self) -> usize {
        std::mem::size_of::<Self>() + self.buffer.size_bytes()
    }
}
