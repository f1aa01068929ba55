use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hoeffding::ClassId;

/// Counts indexed by `(true class, predicted class)`; grows as new class
/// ids appear.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
    total: u64,
}

impl ConfusionMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a matrix from square rows (true class per row).
    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::config("confusion matrix must be square"));
        }
        let total = rows.iter().flatten().sum();
        Ok(Self {
            counts: rows,
            total,
        })
    }

    pub fn record(&mut self, truth: ClassId, predicted: ClassId) {
        let need = truth.max(predicted) + 1;
        if need > self.counts.len() {
            for row in &mut self.counts {
                row.resize(need, 0);
            }
            self.counts.resize(need, vec![0; need]);
        }
        self.counts[truth][predicted] += 1;
        self.total += 1;
    }

    pub fn classes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn get(&self, truth: ClassId, predicted: ClassId) -> u64 {
        self.counts
            .get(truth)
            .and_then(|r| r.get(predicted))
            .copied()
            .unwrap_or(0)
    }

    pub fn correct(&self) -> u64 {
        (0..self.counts.len()).map(|c| self.counts[c][c]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct() as f64 / self.total as f64
        }
    }

    pub fn kappa(&self) -> Result<f64> {
        kappa(self)
    }

    /// Relabels classes: row and column `c` move to `perm[c]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.counts.len();
        assert_eq!(perm.len(), n);
        let mut counts = vec![vec![0; n]; n];
        for (i, row) in self.counts.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                counts[perm[i]][perm[j]] = v;
            }
        }
        Self {
            counts,
            total: self.total,
        }
    }
}

/// Cohen's kappa: `(p_o - p_c) / (1 - p_c)` with `p_c` the chance agreement
/// from the product of true and predicted marginals.
pub fn kappa(cm: &ConfusionMatrix) -> Result<f64> {
    if cm.total == 0 {
        return Err(Error::config("kappa of an empty confusion matrix"));
    }
    let n = cm.total as f64;
    let observed = cm.correct() as f64 / n;
    let chance: f64 = (0..cm.counts.len())
        .map(|c| {
            let row: u64 = cm.counts[c].iter().sum();
            let col: u64 = cm.counts.iter().map(|r| r[c]).sum();
            (row as f64 / n) * (col as f64 / n)
        })
        .sum();
    if 1.0 - chance <= 0.0 {
        return Ok(if observed >= 1.0 { 1.0 } else { 0.0 });
    }
    Ok((observed - chance) / (1.0 - chance))
}

/// Percent correct over the last `min(t + 1, window)` outcomes, for every
/// `t`.
pub fn windowed_accuracy(correct: &[bool], window: usize) -> Vec<f64> {
    assert!(window >= 1, "window must be positive");
    let mut hits = 0usize;
    correct
        .iter()
        .enumerate()
        .map(|(t, &ok)| {
            hits += usize::from(ok);
            if t >= window && correct[t - window] {
                hits -= 1;
            }
            100.0 * hits as f64 / (t + 1).min(window) as f64
        })
        .collect()
}

/// Trapezoidal integral of model size (KB) over elapsed time, in KB-hours.
pub fn ram_hour_cost(size_kb: &[f64], time_s: &[f64]) -> Result<f64> {
    if size_kb.len() != time_s.len() {
        return Err(Error::config(format!(
            "size and time series differ in length ({} vs {})",
            size_kb.len(),
            time_s.len()
        )));
    }
    Ok(size_kb
        .windows(2)
        .zip(time_s.windows(2))
        .map(|(s, t)| 0.5 * (s[0] + s[1]) * (t[1] - t[0]) / 3600.0)
        .sum())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn hand_computed_kappa() {
        let cm = ConfusionMatrix::from_rows(vec![vec![40, 10], vec![20, 30]]).unwrap();
        assert_eq!(cm.accuracy(), 0.7);
        // chance = 0.5 * 0.6 + 0.5 * 0.4 = 0.5
        assert!((kappa(&cm).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn perfect_and_degenerate_kappa() {
        let cm = ConfusionMatrix::from_rows(vec![vec![5, 0], vec![0, 7]]).unwrap();
        assert_eq!(kappa(&cm).unwrap(), 1.0);
        let single = ConfusionMatrix::from_rows(vec![vec![9]]).unwrap();
        assert_eq!(kappa(&single).unwrap(), 1.0);
        assert!(kappa(&ConfusionMatrix::new()).is_err());
    }

    #[test]
    fn random_predictions_have_near_zero_kappa() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut cm = ConfusionMatrix::new();
        for t in 0..10_000 {
            cm.record(t % 2, rng.random_range(0..2));
        }
        assert!(kappa(&cm).unwrap().abs() <= 0.05);
    }

    #[test]
    fn record_grows_matrix() {
        let mut cm = ConfusionMatrix::new();
        cm.record(0, 0);
        cm.record(3, 1);
        assert_eq!(cm.classes(), 4);
        assert_eq!(cm.total(), 2);
        assert_eq!(cm.get(3, 1), 1);
        assert_eq!(cm.accuracy(), 0.5);
    }

    #[test]
    fn windowed_examples() {
        assert!(windowed_accuracy(&[true; 50], 20)
            .iter()
            .all(|&a| a == 100.0));
        let alt: Vec<bool> = (0..10).map(|t| t % 2 == 0).collect();
        assert!(windowed_accuracy(&alt, 2)[1..].iter().all(|&a| a == 50.0));
        assert!(windowed_accuracy(&[], 3).is_empty());
    }

    #[test]
    fn windowed_drop_lasts_exactly_one_window() {
        // 30 hits, 20 misses, 30 hits with window 20: 0% on exactly the
        // steps whose window holds only misses
        let w = 20;
        let log: Vec<bool> = (0..80).map(|t| !(30..50).contains(&t)).collect();
        let series = windowed_accuracy(&log, w);
        let zeros: Vec<usize> = (0..80).filter(|&t| series[t] == 0.0).collect();
        assert_eq!(zeros, vec![49]);
        // oracle: direct recount
        for t in 0..80usize {
            let lo = (t + 1).saturating_sub(w);
            let hits = log[lo..=t].iter().filter(|&&h| h).count();
            assert_eq!(series[t], 100.0 * hits as f64 / (t + 1 - lo) as f64);
        }
    }

    #[test]
    fn cost_examples() {
        assert!((ram_hour_cost(&[100.0, 100.0], &[0.0, 36.0]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(ram_hour_cost(&[100.0], &[0.0]).unwrap(), 0.0);
        assert!((ram_hour_cost(&[0.0, 200.0], &[0.0, 72.0]).unwrap() - 2.0).abs() < 1e-12);
        assert!(
            (ram_hour_cost(&[0.0, 100.0, 200.0], &[0.0, 36.0, 72.0]).unwrap() - 2.0).abs() < 1e-12
        );
        assert!(ram_hour_cost(&[1.0, 2.0], &[0.0]).is_err());
    }

    proptest! {
        #[test]
        fn kappa_invariant_under_relabeling(
            cells in prop::collection::vec(0u64..50, 9),
            perm_seed in 0usize..6,
        ) {
            prop_assume!(cells.iter().sum::<u64>() > 0);
            let rows: Vec<Vec<u64>> = cells.chunks(3).map(<[u64]>::to_vec).collect();
            let cm = ConfusionMatrix::from_rows(rows).unwrap();
            let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            let p = cm.permuted(&perms[perm_seed]);
            prop_assert!((kappa(&cm).unwrap() - kappa(&p).unwrap()).abs() < 1e-12);
            let off_diagonal: u64 = (0..3).flat_map(|i| (0..3).map(move |j| (i, j)))
                .filter(|(i, j)| i != j).map(|(i, j)| cm.get(i, j)).sum();
            prop_assert_eq!(kappa(&cm).unwrap() == 1.0, off_diagonal == 0);
        }
    }
}
