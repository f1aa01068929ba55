use crate::error::Result;
use crate::hoeffding::IncrementalClassifier;

use super::{Ranking, RecentBuffer, SisConfig};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WindowOutcome {
    /// New best window size `b`.
    pub best: usize,
    /// Ranked instances the learner was trained on.
    pub trained: usize,
    /// Predictions made on the trial set.
    pub trial_predictions: usize,
    /// Whether some window met the error threshold.
    pub accepted: bool,
}

/// Search interval `[l, u]` for `len` buffered entries: `b ± r` clamped to
/// `[1, len]`.
pub fn search_limits(prev_best: usize, radius: usize, len: usize) -> (usize, usize) {
    let upper = (prev_best + radius).min(len);
    let lower = prev_best.saturating_sub(radius).max(1).min(len);
    (lower, upper)
}

/// Trains `learner` (already reset) on ranked entries one at a time.
///
/// From the `l`-th entry on, each prefix is scored on the `k` most recent
/// entries in time order; the first prefix whose misclassification rate is
/// below the threshold becomes the new best size. Training never goes past
/// the `u`-th entry; if no prefix qualifies `b` is kept.
pub fn optimal_window_train(
    learner: &mut dyn IncrementalClassifier,
    buffer: &RecentBuffer,
    ranking: &Ranking,
    cfg: &SisConfig,
) -> Result<WindowOutcome> {
    let mut outcome = WindowOutcome {
        best: cfg.prev_best,
        ..WindowOutcome::default()
    };
    let n = buffer.len().min(ranking.len());
    if n == 0 {
        return Ok(outcome);
    }
    let (lower, upper) = search_limits(cfg.prev_best, cfg.radius, n);
    let trial: Vec<_> = buffer.iter().rev().take(cfg.trial_k).collect();
    for i in 1..=n {
        if i > upper {
            break;
        }
        let entry = buffer
            .get(ranking.order[i - 1])
            .expect("ranking positions index the buffer");
        learner.learn_one(entry)?;
        outcome.trained = i;
        if i < lower {
            continue;
        }
        let mut errors = 0usize;
        for x in &trial {
            if learner.predict_one(x)? != x.require_label()? {
                errors += 1;
            }
        }
        outcome.trial_predictions += trial.len();
        let error = errors as f64 / trial.len() as f64;
        if error < cfg.error_threshold {
            outcome.best = i;
            outcome.accepted = true;
            break;
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::DistanceParams;
    use crate::hoeffding::MajorityClass;
    use crate::sis::reorder;
    use crate::stream::Instance;

    fn buffer(labels: &[usize]) -> RecentBuffer {
        let mut b = RecentBuffer::new(labels.len());
        for (t, &y) in labels.iter().enumerate() {
            b.push(Instance::labeled(t as u64, vec![t as f64], y).unwrap())
                .unwrap();
        }
        b
    }

    #[test]
    fn limits_are_clamped() {
        assert_eq!(search_limits(10, 10, 200), (1, 20));
        assert_eq!(search_limits(50, 10, 200), (40, 60));
        assert_eq!(search_limits(195, 10, 200), (185, 200));
        assert_eq!(search_limits(10, 3, 5), (5, 5));
        assert_eq!(search_limits(1, 3, 1), (1, 1));
    }

    #[test]
    fn first_satisfying_window_is_taken() {
        let b = buffer(&[1, 1, 0, 0]);
        let target = Instance::labeled(4, vec![4.0], 0).unwrap();
        let r = reorder(&b, &target, DistanceParams::new(4).unwrap()).unwrap();
        let cfg = SisConfig {
            prev_best: 1,
            ..SisConfig::new(4, 1, 2, 0.1)
        };
        let mut m = MajorityClass::new();
        let out = optimal_window_train(&mut m, &b, &r, &cfg).unwrap();
        assert_eq!(
            out,
            WindowOutcome {
                best: 1,
                trained: 1,
                trial_predictions: 1,
                accepted: true
            }
        );
    }

    #[test]
    fn exhaustion_keeps_b_and_trains_up_to_u() {
        // trial instance has label 1 but majority of any prefix is 0
        let b = buffer(&[0, 0, 0, 0, 0, 0, 0, 1]);
        let target = Instance::labeled(8, vec![0.0], 0).unwrap();
        let r = reorder(&b, &target, DistanceParams::new(8).unwrap()).unwrap();
        let cfg = SisConfig {
            prev_best: 3,
            ..SisConfig::new(8, 1, 2, 0.0)
        };
        let mut m = MajorityClass::new();
        let out = optimal_window_train(&mut m, &b, &r, &cfg).unwrap();
        assert_eq!(out.best, 3);
        assert_eq!(out.trained, 5);
        assert!(!out.accepted);
        assert_eq!(out.trial_predictions, 5 - 1 + 1);
    }

    #[test]
    fn empty_buffer_is_a_no_op() {
        let b = RecentBuffer::new(3);
        let r = Ranking {
            order: vec![],
            distances: vec![],
            comparisons: 0,
        };
        let mut m = MajorityClass::new();
        let out = optimal_window_train(&mut m, &b, &r, &SisConfig::new(3, 1, 1, 0.1)).unwrap();
        assert_eq!(out.trained, 0);
        assert_eq!(out.best, 1);
    }
}
