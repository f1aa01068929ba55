use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::synthetic::synthetic_concept;
use super::{
    apply_feature_drop, read_recorded_stream, synth_gaussian_stream, ClassSpace, CsvSchema,
    GaussianConfig, Instance, Stream,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    #[default]
    Replay,
    AbruptConcat,
    FeatureDrop,
    OverlapSwap,
    SyntheticGaussian,
}

/// A slice of a source: a file path, or a synthetic concept
/// (`gaussian`, `concept:<c>`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub source: String,
    #[serde(default)]
    pub start: usize,
    /// Rows to take; `None` reads to the end of a file source.
    #[serde(default)]
    pub length: Option<usize>,
}

impl Segment {
    pub fn file(path: impl Into<String>, start: usize, length: Option<usize>) -> Self {
        Self {
            source: path.into(),
            start,
            length,
        }
    }

    pub fn synthetic(concept: usize, length: usize) -> Self {
        Self {
            source: format!("concept:{concept}"),
            start: 0,
            length: Some(length),
        }
    }

    fn is_synthetic(&self) -> bool {
        synthetic_concept(&self.source).is_some()
    }
}

/// Recipe for a (possibly drifting) stream.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub segments: Vec<Segment>,
    pub drop_at: Option<u64>,
    pub dropped_feature_indices: Vec<usize>,
    pub seed: u64,
    pub gaussian: GaussianConfig,
    pub schema: CsvSchema,
}

impl ScenarioSpec {
    /// Parses a key-value (TOML) scenario description.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario specs always serialize")
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::config("scenario has no segments"));
        }
        if self.segments.iter().any(|s| s.length == Some(0)) {
            return Err(Error::config("zero-length segment"));
        }
        if self.drop_at.is_some() && self.dropped_feature_indices.is_empty() {
            return Err(Error::config(
                "drop_at given without dropped feature indices",
            ));
        }
        Ok(())
    }

    /// Builds the stream: segments concatenated in order, time indices
    /// renumbered from 0, then the feature drop applied if configured.
    pub fn materialize(&self) -> Result<Stream> {
        self.validate()?;
        let synthetic = self.segments.iter().filter(|s| s.is_synthetic()).count();
        let mut stream = if synthetic == self.segments.len() {
            let spec = ScenarioSpec {
                kind: ScenarioKind::SyntheticGaussian,
                ..self.clone()
            };
            synth_gaussian_stream(&spec)?
        } else if synthetic == 0 {
            self.read_file_segments()?
        } else {
            return Err(Error::config("cannot mix synthetic and file segments"));
        };
        if let Some(at) = self.drop_at {
            if at >= stream.len() as u64 {
                return Err(Error::config(format!(
                    "drop_at {at} outside stream of length {}",
                    stream.len()
                )));
            }
            let instances = std::mem::take(&mut stream.instances);
            stream.instances = apply_feature_drop(instances, at, &self.dropped_feature_indices)?;
        }
        Ok(stream)
    }

    fn read_file_segments(&self) -> Result<Stream> {
        let mut classes = ClassSpace::new();
        let mut cache: HashMap<&str, Vec<Instance>> = HashMap::new();
        let mut instances = Vec::new();
        for seg in &self.segments {
            if !cache.contains_key(seg.source.as_str()) {
                let rows = read_recorded_stream(&seg.source, &self.schema, &mut classes)?;
                cache.insert(&seg.source, rows);
            }
            let rows = &cache[seg.source.as_str()];
            let end = match seg.length {
                Some(len) => seg.start + len,
                None => rows.len(),
            };
            if seg.start >= rows.len() || end > rows.len() {
                return Err(Error::config(format!(
                    "segment {}..{} outside {} ({} rows)",
                    seg.start,
                    end,
                    seg.source,
                    rows.len()
                )));
            }
            for x in &rows[seg.start..end] {
                let mut x = x.clone();
                x.time_index = instances.len() as u64;
                instances.push(x);
            }
        }
        Ok(Stream { instances, classes })
    }
}
