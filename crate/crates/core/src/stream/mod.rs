//! Instances, label spaces and stream sources.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hoeffding::ClassId;

mod reader;
mod scenario;
mod synthetic;

pub use reader::{read_recorded_stream, CsvSchema};
pub use scenario::{ScenarioKind, ScenarioSpec, Segment};
pub use synthetic::{synth_gaussian_stream, GaussianConfig};

/// One timestamped feature vector with an optional class label.
///
/// `feature_keys` records which original columns the features correspond
/// to once some of them have been dropped. `None` means the identity
/// layout `0..m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub time_index: u64,
    pub features: Vec<f64>,
    pub label: Option<ClassId>,
    pub feature_keys: Option<Arc<[usize]>>,
}

impl Instance {
    /// Builds a validated instance: at least one feature, all finite.
    pub fn new(time_index: u64, features: Vec<f64>, label: Option<ClassId>) -> Result<Self> {
        validate_features(&features)?;
        Ok(Self {
            time_index,
            features,
            label,
            feature_keys: None,
        })
    }

    pub fn labeled(time_index: u64, features: Vec<f64>, label: ClassId) -> Result<Self> {
        Self::new(time_index, features, Some(label))
    }

    pub fn dimension(&self) -> usize {
        self.features.len()
    }

    /// Original column of the feature stored at `position`.
    pub fn feature_key(&self, position: usize) -> usize {
        match &self.feature_keys {
            Some(keys) => keys[position],
            None => position,
        }
    }

    pub fn require_label(&self) -> Result<ClassId> {
        self.label.ok_or(Error::Unlabeled {
            time_index: self.time_index,
        })
    }

    /// Copy of this instance with the features replaced, keeping time,
    /// label and layout.
    pub fn with_features(&self, features: Vec<f64>) -> Self {
        Self {
            time_index: self.time_index,
            features,
            label: self.label,
            feature_keys: self.feature_keys.clone(),
        }
    }

    /// Positions in `self.features` that hold the columns present in
    /// `target`, in target order.
    ///
    /// When neither side carries explicit keys the target is assumed to be
    /// a prefix of this layout.
    pub fn positions_for(&self, target: &Instance) -> Result<Vec<usize>> {
        let target_dim = target.dimension();
        if self.feature_keys.is_none() && target.feature_keys.is_none() {
            if target_dim > self.dimension() {
                return Err(Error::DimensionMismatch {
                    expected: target_dim,
                    found: self.dimension(),
                });
            }
            return Ok((0..target_dim).collect());
        }
        let own: HashMap<usize, usize> = (0..self.dimension())
            .map(|p| (self.feature_key(p), p))
            .collect();
        (0..target_dim)
            .map(|p| {
                let key = target.feature_key(p);
                own.get(&key).copied().ok_or(Error::MissingFeature {
                    position: key,
                    dimension: self.dimension(),
                })
            })
            .collect()
    }

    /// Keeps only the given feature positions, in the given order.
    pub fn project(&self, positions: &[usize]) -> Self {
        let features = positions.iter().map(|&p| self.features[p]).collect();
        let keys: Arc<[usize]> = positions.iter().map(|&p| self.feature_key(p)).collect();
        let identity = keys.iter().enumerate().all(|(i, &k)| i == k);
        Self {
            time_index: self.time_index,
            features,
            label: self.label,
            feature_keys: if identity { None } else { Some(keys) },
        }
    }
}

pub(crate) fn validate_features(features: &[f64]) -> Result<()> {
    if features.is_empty() {
        return Err(Error::EmptyFeatures);
    }
    if let Some(position) = features.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { position });
    }
    Ok(())
}

/// Labels interned to dense ids in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct ClassSpace {
    labels: Vec<String>,
    index: HashMap<String, ClassId>,
}

impl ClassSpace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, label: &str) -> ClassId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn id(&self, label: &str) -> Option<ClassId> {
        self.index.get(label).copied()
    }

    pub fn name(&self, id: ClassId) -> Option<&str> {
        self.labels.get(id).map(String::as_str)
    }

    /// Label text for `id`, falling back to the numeric id.
    pub fn display(&self, id: ClassId) -> String {
        self.name(id).map_or_else(|| id.to_string(), str::to_owned)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

impl From<Vec<String>> for ClassSpace {
    fn from(labels: Vec<String>) -> Self {
        let mut space = ClassSpace::new();
        for l in &labels {
            space.intern(l);
        }
        space
    }
}

impl From<ClassSpace> for Vec<String> {
    fn from(space: ClassSpace) -> Self {
        space.labels
    }
}

/// A finite labeled stream together with its label space.
#[derive(Debug, Clone, Default)]
pub struct Stream {
    pub instances: Vec<Instance>,
    pub classes: ClassSpace,
}

impl Stream {
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }
}

/// Removes the feature positions in `dropped` from every instance whose
/// time index is at least `drop_at`. Earlier instances are untouched.
pub fn apply_feature_drop(
    stream: Vec<Instance>,
    drop_at: u64,
    dropped: &[usize],
) -> Result<Vec<Instance>> {
    if dropped.is_empty() {
        return Ok(stream);
    }
    let Some(first) = stream.iter().find(|x| x.time_index >= drop_at) else {
        return Err(Error::config(format!(
            "drop_at {drop_at} is beyond the end of the stream"
        )));
    };
    let dim = first.dimension();
    if let Some(&bad) = dropped.iter().find(|&&j| j >= dim) {
        return Err(Error::MissingFeature {
            position: bad,
            dimension: dim,
        });
    }
    let keep: Vec<usize> = (0..dim).filter(|j| !dropped.contains(j)).collect();
    if keep.is_empty() {
        return Err(Error::config("feature drop would remove every feature"));
    }
    stream
        .into_iter()
        .map(|x| {
            if x.time_index < drop_at {
                return Ok(x);
            }
            if x.dimension() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: x.dimension(),
                });
            }
            Ok(x.project(&keep))
        })
        .collect()
}
