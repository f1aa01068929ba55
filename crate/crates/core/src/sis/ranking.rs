use crate::distance::{spatio_temporal_distance, DistanceParams};
use crate::error::Result;
use crate::stream::Instance;

use super::RecentBuffer;

/// Buffer positions ordered by non-decreasing distance to the target.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    /// `order[i]` is the buffer position (0 = oldest) ranked `i`.
    pub order: Vec<usize>,
    /// Distances in ranked order.
    pub distances: Vec<f64>,
    /// Distance comparisons performed while sorting.
    pub comparisons: u64,
}

impl Ranking {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn objective(&self) -> f64 {
        objective(&self.distances)
    }
}

/// Sum of absolute differences between consecutive distances.
pub fn objective(distances: &[f64]) -> f64 {
    distances.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Ranks the buffer by spatio-temporal distance to `target`.
///
/// Any non-decreasing order minimises the sum of consecutive distance gaps
/// (the minimum is `max - min`). The sort is an insertion sort over the
/// entries taken most recent first, so equal distances keep the more recent
/// entry ahead and the comparison count follows the quadratic cost model.
pub fn reorder(
    buffer: &RecentBuffer,
    target: &Instance,
    params: DistanceParams,
) -> Result<Ranking> {
    let mut ranked: Vec<(usize, f64)> = Vec::with_capacity(buffer.len());
    for (position, entry) in buffer.iter().enumerate().rev() {
        ranked.push((position, spatio_temporal_distance(target, entry, params)?));
    }
    let mut comparisons = 0u64;
    for i in 1..ranked.len() {
        let mut j = i;
        while j > 0 {
            comparisons += 1;
            if ranked[j - 1].1 > ranked[j].1 {
                ranked.swap(j - 1, j);
                j -= 1;
            } else {
                break;
            }
        }
    }
    let (order, distances) = ranked.into_iter().unzip();
    Ok(Ranking {
        order,
        distances,
        comparisons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn buffer_with(features: &[f64]) -> RecentBuffer {
        let mut b = RecentBuffer::new(features.len().max(1));
        for (t, &f) in features.iter().enumerate() {
            b.push(Instance::labeled(t as u64, vec![f], 0).unwrap())
                .unwrap();
        }
        b
    }

    fn target(t: u64) -> Instance {
        Instance::labeled(t, vec![0.0], 0).unwrap()
    }

    #[test]
    fn ascending_order() {
        // huge horizon makes the time term negligible
        let p = DistanceParams::new(1_000_000_000).unwrap();
        let b = buffer_with(&[0.9, 0.1, 0.5]);
        let r = reorder(&b, &target(3), p).unwrap();
        assert_eq!(r.order, vec![1, 2, 0]);
        assert!((r.objective() - 0.8).abs() < 1e-6);
    }

    #[test]
    fn single_entry() {
        let r = reorder(
            &buffer_with(&[2.0]),
            &target(1),
            DistanceParams::new(10).unwrap(),
        )
        .unwrap();
        assert_eq!(r.order, vec![0]);
        assert_eq!(r.objective(), 0.0);
        assert_eq!(r.comparisons, 0);
    }

    #[test]
    fn ties_prefer_recent_entries() {
        // lag/N + |feature| is exactly 1.0 for every entry
        let mut b = RecentBuffer::new(3);
        for (t, f) in [(0u64, 0.0), (2, 0.5), (3, 0.75)] {
            b.push(Instance::labeled(t, vec![f], 0).unwrap()).unwrap();
        }
        let r = reorder(&b, &target(4), DistanceParams::new(4).unwrap()).unwrap();
        assert_eq!(r.distances, vec![1.0, 1.0, 1.0]);
        assert_eq!(r.order, vec![2, 1, 0]);
        assert_eq!(r.objective(), 0.0);
    }
}
