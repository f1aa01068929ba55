use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::stream::{CsvSchema, GaussianConfig, ScenarioKind, ScenarioSpec, Segment};

/// The four evaluation scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScenarioName {
    /// Straight replay of one source.
    #[default]
    I,
    /// Fault, normal, fault under shifted conditions.
    II,
    /// Replay with features disappearing mid-stream.
    III,
    /// Two sources concatenated, in both orders.
    IV,
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Self::I),
            "II" | "2" => Ok(Self::II),
            "III" | "3" => Ok(Self::III),
            "IV" | "4" => Ok(Self::IV),
            _ => Err(Error::config(format!(
                "unknown scenario {s:?} (expected I, II, III or IV)"
            ))),
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Self::I => "I",
            Self::II => "II",
            Self::III => "III",
            Self::IV => "IV",
        })
    }
}

/// Knobs for [`make_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    /// Row ranges of file sources, in segment order. Segment `i` reads
    /// source `min(i, sources - 1)`.
    pub segments: Vec<Range<usize>>,
    pub drop_at: u64,
    pub dropped: Vec<usize>,
    /// Total length of synthetic streams.
    pub length: usize,
    pub seed: u64,
    pub schema: CsvSchema,
    pub gaussian: GaussianConfig,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            segments: Vec::new(),
            drop_at: 500,
            dropped: vec![0],
            length: 5000,
            seed: 0,
            schema: CsvSchema::default(),
            gaussian: GaussianConfig::default(),
        }
    }
}

/// True for `synthetic`, `synthetic:gaussian` and `gaussian`.
pub fn is_synthetic_source(source: &str) -> bool {
    matches!(source, "synthetic" | "synthetic:gaussian" | "gaussian")
}

/// Builds the stream recipe(s) for a named scenario. IV yields both
/// segment orders; the others yield one spec.
pub fn make_scenario(
    name: ScenarioName,
    sources: &[String],
    params: &ScenarioParams,
) -> Result<Vec<ScenarioSpec>> {
    let first = sources
        .first()
        .ok_or_else(|| Error::config(format!("scenario {name} needs a source")))?;
    let synthetic = is_synthetic_source(first);
    if sources.iter().any(|s| is_synthetic_source(s) != synthetic) {
        return Err(Error::config("cannot mix synthetic and file sources"));
    }
    let base = ScenarioSpec {
        seed: params.seed,
        schema: params.schema.clone(),
        gaussian: params.gaussian.clone(),
        ..ScenarioSpec::default()
    };
    let segments = |want: usize| -> Result<Vec<Segment>> {
        if synthetic {
            let n = params.length;
            if n < want {
                return Err(Error::config("synthetic length too short for scenario"));
            }
            let concepts: &[usize] = match want {
                1 => &[0],
                2 => &[0, 1],
                _ => &[0, 1, 0],
            };
            let mut out = Vec::new();
            for (i, &c) in concepts.iter().enumerate() {
                let len = n * (i + 1) / want - n * i / want;
                out.push(Segment::synthetic(c, len));
            }
            return Ok(out);
        }
        if params.segments.is_empty() {
            if want == 1 || sources.len() == want {
                return Ok(sources
                    .iter()
                    .take(want)
                    .map(|s| Segment::file(s, 0, None))
                    .collect());
            }
            return Err(Error::config(format!(
                "scenario {name} needs {want} sources or {want} segment ranges"
            )));
        }
        if params.segments.len() != want {
            return Err(Error::config(format!(
                "scenario {name} needs {want} segment ranges, got {}",
                params.segments.len()
            )));
        }
        params
            .segments
            .iter()
            .enumerate()
            .map(|(i, r)| {
                if r.end <= r.start {
                    return Err(Error::config(format!("empty segment range {r:?}")));
                }
                let src = &sources[i.min(sources.len() - 1)];
                Ok(Segment::file(src, r.start, Some(r.end - r.start)))
            })
            .collect()
    };
    Ok(match name {
        ScenarioName::I => vec![ScenarioSpec {
            kind: ScenarioKind::Replay,
            segments: segments(1)?,
            ..base
        }],
        ScenarioName::II => vec![ScenarioSpec {
            kind: ScenarioKind::AbruptConcat,
            segments: segments(3)?,
            ..base
        }],
        ScenarioName::III => {
            if params.dropped.is_empty() {
                return Err(Error::config("scenario III needs dropped feature indices"));
            }
            vec![ScenarioSpec {
                kind: ScenarioKind::FeatureDrop,
                segments: segments(1)?,
                drop_at: Some(params.drop_at),
                dropped_feature_indices: params.dropped.clone(),
                ..base
            }]
        }
        ScenarioName::IV => {
            let forward = segments(2)?;
            let mut backward = forward.clone();
            backward.reverse();
            [forward, backward]
                .into_iter()
                .map(|segments| ScenarioSpec {
                    kind: ScenarioKind::OverlapSwap,
                    segments,
                    ..base.clone()
                })
                .collect()
        }
    })
}

/// Parses `START..END` (or `START:LEN`) row ranges.
pub fn parse_range(s: &str) -> Result<Range<usize>> {
    let bad = || Error::config(format!("bad segment range {s:?} (expected START..END)"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    if let Some((a, b)) = s.split_once("..") {
        Ok(num(a)?..num(b)?)
    } else if let Some((a, len)) = s.split_once(':') {
        let a = num(a)?;
        Ok(a..a + num(len)?)
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use std::io::Write;

    use super::*;

    fn synth() -> Vec<String> {
        vec!["synthetic:gaussian".into()]
    }

    #[test]
    fn scenario_names_parse() {
        assert_eq!("iii".parse::<ScenarioName>().unwrap(), ScenarioName::III);
        assert_eq!("4".parse::<ScenarioName>().unwrap(), ScenarioName::IV);
        assert!("V".parse::<ScenarioName>().is_err());
    }

    #[test]
    fn scenario_three_shrinks_at_drop() {
        let params = ScenarioParams {
            length: 1000,
            dropped: vec![1],
            ..ScenarioParams::default()
        };
        let specs = make_scenario(ScenarioName::III, &synth(), &params).unwrap();
        let s = specs[0].materialize().unwrap();
        assert_eq!(s.instances[499].dimension(), 4);
        assert_eq!(s.instances[500].dimension(), 3);
    }

    #[test]
    fn scenario_four_orders_differ_only_in_order() {
        let specs = make_scenario(ScenarioName::IV, &synth(), &ScenarioParams::default()).unwrap();
        assert_eq!(specs.len(), 2);
        let mut reversed = specs[1].segments.clone();
        reversed.reverse();
        assert_eq!(specs[0].segments, reversed);
        assert_ne!(specs[0].segments, specs[1].segments);
        assert_eq!(
            ScenarioSpec {
                segments: vec![],
                ..specs[0].clone()
            },
            ScenarioSpec {
                segments: vec![],
                ..specs[1].clone()
            }
        );
    }

    #[test]
    fn replay_keeps_file_length() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for t in 0..5000 {
            writeln!(f, "{t},{},L{}", t % 7, t % 3).unwrap();
        }
        let sources = vec![f.path().display().to_string()];
        let specs = make_scenario(ScenarioName::I, &sources, &ScenarioParams::default()).unwrap();
        assert_eq!(specs[0].materialize().unwrap().len(), 5000);
    }

    #[test]
    fn missing_sources_and_ranges_are_errors() {
        let params = ScenarioParams::default();
        assert!(make_scenario(ScenarioName::I, &[], &params).is_err());
        let one = vec!["a.csv".to_string()];
        assert!(make_scenario(ScenarioName::II, &one, &params).is_err());
        assert!(make_scenario(ScenarioName::IV, &one, &params).is_err());
        let ranges = ScenarioParams {
            segments: vec![0..10, 10..20, 20..30],
            ..ScenarioParams::default()
        };
        let specs = make_scenario(ScenarioName::II, &one, &ranges).unwrap();
        assert_eq!(specs[0].segments[2], Segment::file("a.csv", 20, Some(10)));
    }

    #[test]
    fn synthetic_two_splits_length() {
        let params = ScenarioParams {
            length: 301,
            ..ScenarioParams::default()
        };
        let specs = make_scenario(ScenarioName::II, &synth(), &params).unwrap();
        let total: usize = specs[0].segments.iter().map(|s| s.length.unwrap()).sum();
        assert_eq!(total, 301);
    }

    #[test]
    fn ranges_parse() {
        assert_eq!(parse_range("10..25").unwrap(), 10..25);
        assert_eq!(parse_range("10:5").unwrap(), 10..15);
        assert!(parse_range("ten").is_err());
    }
}
