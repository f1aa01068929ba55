use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Minimum window length before any cut is tested.
const MIN_WINDOW: u64 = 10;
/// Minimum length of each sub-window at a cut point.
const MIN_SUB_WINDOW: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Bucket {
    total: f64,
    /// Sum of squared deviations from the bucket mean.
    variance: f64,
    count: u64,
}

/// Adaptive windowing change detector and mean estimator.
///
/// The window is stored as an exponential histogram: row `i` holds buckets
/// of `2^i` values, at most `max_buckets` per row, newest first. After every
/// insertion each boundary between buckets is tested as a cut point; while
/// some cut shows the two sub-windows' means differ by more than the
/// Hoeffding-style threshold at confidence `delta`, the oldest bucket is
/// dropped.
#[derive(Debug, Clone)]
pub struct Adwin {
    delta: f64,
    max_buckets: usize,
    rows: Vec<VecDeque<Bucket>>,
    total: f64,
    variance: f64,
    width: u64,
    detections: u64,
}

impl Default for Adwin {
    fn default() -> Self {
        Self::new(0.002)
    }
}

impl Adwin {
    pub const DEFAULT_MAX_BUCKETS: usize = 5;

    pub fn new(delta: f64) -> Self {
        Self::with_max_buckets(delta, Self::DEFAULT_MAX_BUCKETS)
    }

    pub fn with_max_buckets(delta: f64, max_buckets: usize) -> Self {
        assert!(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
        assert!(max_buckets >= 2, "need at least two buckets per row");
        Self {
            delta,
            max_buckets,
            rows: Vec::new(),
            total: 0.0,
            variance: 0.0,
            width: 0,
            detections: 0,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Adds a value in `[0, 1]`; returns whether a change was detected.
    pub fn update(&mut self, value: f64) -> Result<bool> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::OutOfRange { value });
        }
        Ok(self.add(value))
    }

    pub(crate) fn add(&mut self, value: f64) -> bool {
        self.insert(value);
        let detected = self.shrink();
        if detected {
            self.detections += 1;
        }
        detected
    }

    pub fn width(&self) -> u64 {
        self.width
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn mean(&self) -> f64 {
        if self.width == 0 {
            0.0
        } else {
            self.total / self.width as f64
        }
    }

    /// Population variance of the window.
    pub fn variance(&self) -> f64 {
        if self.width == 0 {
            0.0
        } else {
            (self.variance / self.width as f64).max(0.0)
        }
    }

    pub fn detections(&self) -> u64 {
        self.detections
    }

    pub fn bucket_count(&self) -> usize {
        self.rows.iter().map(VecDeque::len).sum()
    }

    /// Sum of the bucket totals and counts, recomputed from storage.
    pub fn stored_total_and_count(&self) -> (f64, u64) {
        self.rows
            .iter()
            .flatten()
            .fold((0.0, 0), |(t, n), b| (t + b.total, n + b.count))
    }

    pub fn reset(&mut self) {
        *self = Self::with_max_buckets(self.delta, self.max_buckets);
    }

    /// Rough footprint at the default bucket budget over a 2^32 window.
    pub const SIZE_BYTES: usize = std::mem::size_of::<Self>()
        + 32 * (Self::DEFAULT_MAX_BUCKETS + 1) * std::mem::size_of::<Bucket>();

    fn insert(&mut self, value: f64) {
        if self.width > 0 {
            let w = self.width as f64;
            let prev_mean = self.total / w;
            self.variance += w * (value - prev_mean).powi(2) / (w + 1.0);
        }
        self.width += 1;
        self.total += value;
        if self.rows.is_empty() {
            self.rows.push(VecDeque::new());
        }
        self.rows[0].push_front(Bucket {
            total: value,
            variance: 0.0,
            count: 1,
        });
        self.compress();
    }

    fn compress(&mut self) {
        let mut row = 0;
        while row < self.rows.len() {
            if self.rows[row].len() <= self.max_buckets {
                break;
            }
            let older = self.rows[row].pop_back().expect("row over capacity");
            let newer = self.rows[row].pop_back().expect("row over capacity");
            let (n1, n2) = (older.count as f64, newer.count as f64);
            let (m1, m2) = (older.total / n1, newer.total / n2);
            let merged = Bucket {
                total: older.total + newer.total,
                variance: older.variance + newer.variance + n1 * n2 * (m1 - m2).powi(2) / (n1 + n2),
                count: older.count + newer.count,
            };
            if row + 1 == self.rows.len() {
                self.rows.push(VecDeque::new());
            }
            self.rows[row + 1].push_front(merged);
            row += 1;
        }
    }

    fn drop_oldest(&mut self) {
        let Some(last) = self.rows.iter().rposition(|r| !r.is_empty()) else {
            return;
        };
        let b = self.rows[last].pop_back().expect("non-empty row");
        self.width -= b.count;
        self.total -= b.total;
        if self.width == 0 {
            self.total = 0.0;
            self.variance = 0.0;
        } else {
            let (n1, w) = (b.count as f64, self.width as f64);
            let m1 = b.total / n1;
            self.variance -= b.variance + n1 * w * (m1 - self.total / w).powi(2) / (n1 + w);
            self.variance = self.variance.max(0.0);
        }
        while self.rows.last().is_some_and(VecDeque::is_empty) {
            self.rows.pop();
        }
    }

    fn shrink(&mut self) -> bool {
        let mut detected = false;
        while self.width >= MIN_WINDOW && self.find_cut() {
            self.drop_oldest();
            detected = true;
        }
        detected
    }

    /// Tests every bucket boundary, oldest sub-window growing first.
    fn find_cut(&self) -> bool {
        let n = self.width as f64;
        let v = self.variance();
        let dd = (2.0 * n.ln() / self.delta).ln();
        let mut n0 = 0u64;
        let mut u0 = 0.0;
        for b in self.rows.iter().rev().flat_map(|r| r.iter().rev()) {
            n0 += b.count;
            u0 += b.total;
            let n1 = self.width - n0;
            if n1 <= MIN_SUB_WINDOW + 1 {
                break;
            }
            if n0 <= MIN_SUB_WINDOW + 1 {
                continue;
            }
            let u1 = self.total - u0;
            let diff = (u0 / n0 as f64 - u1 / n1 as f64).abs();
            let m = 1.0 / (n0 - MIN_SUB_WINDOW + 1) as f64 + 1.0 / (n1 - MIN_SUB_WINDOW + 1) as f64;
            let eps = (2.0 * m * v * dd).sqrt() + 2.0 / 3.0 * dd * m;
            if diff > eps {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use std::collections::VecDeque;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn single_value() {
        let mut a = Adwin::default();
        assert!(!a.update(0.7).unwrap());
        assert_eq!(a.mean(), 0.7);
        assert_eq!(a.width(), 1);
    }

    #[test]
    fn rejects_out_of_range() {
        let mut a = Adwin::default();
        assert!(a.update(1.5).is_err());
        assert!(a.update(-0.1).is_err());
        assert!(a.update(f64::NAN).is_err());
    }

    #[test]
    fn constant_stream_never_fires() {
        let mut a = Adwin::default();
        for _ in 0..10_000 {
            assert!(!a.update(0.5).unwrap());
        }
        assert_eq!(a.width(), 10_000);
        assert!((a.mean() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn detects_mean_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut a = Adwin::default();
        let mut first = None;
        for t in 0..2000 {
            let p = if t < 1000 { 0.2 } else { 0.8 };
            let v = if rng.random_bool(p) { 1.0 } else { 0.0 };
            if a.update(v).unwrap() && t >= 1000 && first.is_none() {
                first = Some(t);
            }
        }
        let t = first.expect("change detected");
        assert!(t < 1300, "{t}");
        assert!(a.width() <= 1100, "{}", a.width());
        assert!((a.mean() - 0.8).abs() < 0.1);
    }

    #[test]
    fn compression_preserves_totals_against_shadow_window() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut a = Adwin::default();
        let mut shadow: VecDeque<f64> = VecDeque::new();
        for t in 0..6000 {
            let p = if (t / 1500) % 2 == 0 { 0.1 } else { 0.9 };
            let v = if rng.random_bool(p) { 1.0 } else { 0.0 };
            a.update(v).unwrap();
            shadow.push_back(v);
            while shadow.len() as u64 > a.width() {
                shadow.pop_front();
            }
            let (total, count) = a.stored_total_and_count();
            assert_eq!(count, a.width());
            assert_eq!(total, shadow.iter().sum::<f64>());
            assert_eq!(a.total(), total);
            assert!(a.bucket_count() <= (Adwin::DEFAULT_MAX_BUCKETS + 1) * 32);
        }
        assert!(a.detections() >= 3);
    }

    #[test]
    fn stationary_mean_converges() {
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut a = Adwin::default();
            for _ in 0..5000 {
                a.update(if rng.random_bool(0.3) { 1.0 } else { 0.0 })
                    .unwrap();
            }
            assert!((a.mean() - 0.3).abs() <= 0.03, "seed {seed}: {}", a.mean());
        }
    }

    #[test]
    fn variance_matches_window() {
        let mut a = Adwin::default();
        let values = [0.0, 1.0, 1.0, 0.0, 1.0, 0.25, 0.75, 0.5];
        for v in values {
            a.update(v).unwrap();
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
        assert!((a.variance() - var).abs() < 1e-12);
    }
}
