use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{ClassSpace, Instance, ScenarioKind, ScenarioSpec, Stream};
use crate::error::{Error, Result};

/// Class-conditional Gaussian stream parameters.
///
/// Class `c` is centred at `separation` on every coordinate `j` with
/// `j % n_classes == c` and at 0 elsewhere. Coordinates are multiplied by a
/// repeating unit factor of 1, 100, 0.01 when `mixed_units` is set, so that
/// unscaled distances are dominated by a few features.
///
/// Labels persist for runs of geometric length with mean
/// `mean_run_length`; a run length of 1 gives i.i.d. labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaussianConfig {
    pub n_classes: usize,
    pub dimension: usize,
    pub separation: f64,
    pub noise_std: f64,
    pub priors: Option<Vec<f64>>,
    pub mean_run_length: f64,
    pub mixed_units: bool,
}

impl Default for GaussianConfig {
    fn default() -> Self {
        Self {
            n_classes: 2,
            dimension: 4,
            separation: 4.0,
            noise_std: 1.0,
            priors: None,
            mean_run_length: 1.0,
            mixed_units: true,
        }
    }
}

const UNIT_FACTORS: [f64; 3] = [1.0, 100.0, 0.01];

impl GaussianConfig {
    fn validate(&self) -> Result<()> {
        if self.n_classes < 1 || self.dimension < 1 {
            return Err(Error::config("need at least one class and one feature"));
        }
        if self.n_classes > self.dimension {
            return Err(Error::config("n_classes must not exceed dimension"));
        }
        if !(self.noise_std > 0.0 && self.noise_std.is_finite()) {
            return Err(Error::config("noise_std must be positive"));
        }
        if self.mean_run_length.is_nan() || self.mean_run_length < 1.0 {
            return Err(Error::config("mean_run_length must be at least 1"));
        }
        if let Some(p) = &self.priors {
            if p.len() != self.n_classes
                || p.iter().any(|&w| w.is_nan() || w < 0.0)
                || p.iter().sum::<f64>() <= 0.0
            {
                return Err(Error::config(
                    "priors must be n_classes non-negative weights",
                ));
            }
        }
        Ok(())
    }

    /// Mean vector of the distribution with index `component`.
    pub fn mean(&self, component: usize) -> Vec<f64> {
        (0..self.dimension)
            .map(|j| {
                let on = if j % self.n_classes == component {
                    self.separation
                } else {
                    0.0
                };
                on * self.unit(j)
            })
            .collect()
    }

    fn unit(&self, j: usize) -> f64 {
        if self.mixed_units {
            UNIT_FACTORS[j % UNIT_FACTORS.len()]
        } else {
            1.0
        }
    }
}

/// Concept offset encoded in a synthetic segment source: `gaussian` is
/// concept 0, `concept:<c>` rotates the label-to-distribution mapping by `c`.
pub(crate) fn synthetic_concept(source: &str) -> Option<usize> {
    match source {
        "gaussian" | "synthetic" | "synthetic:gaussian" => Some(0),
        s => s.strip_prefix("concept:").and_then(|c| c.parse().ok()),
    }
}

/// Draws a class-conditional Gaussian stream, segment by segment.
///
/// Within a segment with concept `c`, an instance labelled `y` is drawn
/// from component `(y + c) % n_classes`, so changing `c` between segments
/// is an abrupt real drift with unchanged marginals. The output depends
/// only on the spec, including its seed.
pub fn synth_gaussian_stream(spec: &ScenarioSpec) -> Result<Stream> {
    if spec.kind != ScenarioKind::SyntheticGaussian {
        return Err(Error::config("scenario kind is not synthetic-gaussian"));
    }
    if spec.segments.is_empty() {
        return Err(Error::config("scenario has no segments"));
    }
    let cfg = &spec.gaussian;
    cfg.validate()?;

    let mut classes = ClassSpace::new();
    for c in 0..cfg.n_classes {
        classes.intern(&format!("c{c}"));
    }
    let means: Vec<Vec<f64>> = (0..cfg.n_classes).map(|c| cfg.mean(c)).collect();
    let prior = WeightedIndex::new(
        cfg.priors
            .clone()
            .unwrap_or_else(|| vec![1.0; cfg.n_classes]),
    )
    .map_err(|e| Error::config(e.to_string()))?;
    let noise = Normal::new(0.0, cfg.noise_std).map_err(|e| Error::config(e.to_string()))?;
    let switch_p = 1.0 / cfg.mean_run_length;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut instances = Vec::new();
    let mut current: Option<usize> = None;
    for seg in &spec.segments {
        let concept = synthetic_concept(&seg.source)
            .ok_or_else(|| Error::config(format!("not a synthetic source: {:?}", seg.source)))?;
        let length = seg
            .length
            .ok_or_else(|| Error::config("synthetic segments need an explicit length"))?;
        if length == 0 {
            return Err(Error::config("zero-length segment"));
        }
        for _ in 0..length {
            let y = match current {
                Some(y) if !rng.random_bool(switch_p) => y,
                _ => prior.sample(&mut rng),
            };
            current = Some(y);
            let component = (y + concept) % cfg.n_classes;
            let features = means[component]
                .iter()
                .enumerate()
                .map(|(j, m)| m + noise.sample(&mut rng) * cfg.unit(j))
                .collect();
            instances.push(Instance::labeled(instances.len() as u64, features, y)?);
        }
    }
    Ok(Stream { instances, classes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::Segment;

    fn spec(segments: Vec<Segment>, seed: u64) -> ScenarioSpec {
        ScenarioSpec {
            kind: ScenarioKind::SyntheticGaussian,
            segments,
            seed,
            ..ScenarioSpec::default()
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let s = spec(vec![Segment::synthetic(0, 1000)], 7);
        let a = synth_gaussian_stream(&s).unwrap();
        let b = synth_gaussian_stream(&s).unwrap();
        assert_eq!(a.instances, b.instances);
        let c = synth_gaussian_stream(&spec(vec![Segment::synthetic(0, 1000)], 8)).unwrap();
        assert_ne!(a.instances, c.instances);
    }

    #[test]
    fn flipped_mapping_moves_class_mean() {
        let mut s = spec(
            vec![Segment::synthetic(0, 500), Segment::synthetic(1, 500)],
            3,
        );
        s.gaussian.mixed_units = false;
        let st = synth_gaussian_stream(&s).unwrap();
        let mean0 = |range: std::ops::Range<usize>| {
            let xs: Vec<f64> = st.instances[range]
                .iter()
                .filter(|x| x.label == Some(0))
                .map(|x| x.features[0])
                .collect();
            xs.iter().sum::<f64>() / xs.len() as f64
        };
        let before = mean0(0..500);
        let after = mean0(500..1000);
        assert!((before - 4.0).abs() < 0.5, "{before}");
        assert!(after.abs() < 0.5, "{after}");
    }

    #[test]
    fn empirical_prior_matches_configuration() {
        let mut s = spec(vec![Segment::synthetic(0, 10_000)], 11);
        s.gaussian.n_classes = 3;
        s.gaussian.priors = Some(vec![0.5, 0.3, 0.2]);
        let st = synth_gaussian_stream(&s).unwrap();
        let mut counts = [0usize; 3];
        for x in &st.instances {
            counts[x.label.unwrap()] += 1;
        }
        for (c, p) in counts.iter().zip([0.5, 0.3, 0.2]) {
            let freq = *c as f64 / 10_000.0;
            assert!((freq - p).abs() <= 0.02, "{freq} vs {p}");
        }
    }

    #[test]
    fn run_length_produces_label_persistence() {
        let mut s = spec(vec![Segment::synthetic(0, 5000)], 5);
        s.gaussian.mean_run_length = 50.0;
        let st = synth_gaussian_stream(&s).unwrap();
        let changes = st
            .instances
            .windows(2)
            .filter(|w| w[0].label != w[1].label)
            .count();
        // geometric runs of mean 50 with a 1/2 chance of redrawing the same label
        assert!((25..100).contains(&changes), "{changes}");
    }

    #[test]
    fn zero_length_segment_is_rejected() {
        let s = spec(vec![Segment::synthetic(0, 0)], 1);
        assert!(synth_gaussian_stream(&s).is_err());
    }

    #[test]
    fn time_indices_are_contiguous() {
        let s = spec(
            vec![Segment::synthetic(0, 30), Segment::synthetic(1, 20)],
            1,
        );
        let st = synth_gaussian_stream(&s).unwrap();
        assert!(st
            .instances
            .iter()
            .enumerate()
            .all(|(i, x)| x.time_index == i as u64));
    }
}
