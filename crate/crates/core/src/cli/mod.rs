//! Benchmark orchestration behind the `sis-bench` binary.
//!
//! Everything the binary does is available here: build a [`RunConfig`],
//! call [`run`] or [`run_battery`].

mod args;
mod scenarios;

use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use args::{main_with_args, Args, BatteryArgs, Command, CommonArgs, RunArgs};
pub use scenarios::{
    is_synthetic_source, make_scenario, parse_range, ScenarioName, ScenarioParams,
};

use crate::drift::wrap_with_ddm;
use crate::error::{Error, Result};
use crate::evaluation::{
    prequential_run, write_log, write_summary, write_windowed, PrequentialConfig,
    PrequentialReport, RunFailure, SummaryRow,
};
use crate::hoeffding::{HoeffdingAdaptiveTree, HoeffdingTree, IncrementalClassifier, TreeConfig};
use crate::sis::SisConfig;
use crate::stream::{ClassSpace, ScenarioSpec, Stream};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "SIS_BENCH_OUT";

pub const SUMMARY_FILE: &str = "summary.csv";
pub const LOG_FILE: &str = "log.csv";
pub const WINDOWED_FILE: &str = "windowed.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LearnerKind {
    #[serde(rename = "hat+sis")]
    HatSis,
    #[serde(rename = "hat+ddm")]
    HatDdm,
    #[serde(rename = "ht+ddm")]
    HtDdm,
    #[serde(rename = "ht")]
    Ht,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 4] = [Self::HatSis, Self::HatDdm, Self::HtDdm, Self::Ht];

    pub fn uses_sis(self) -> bool {
        self == Self::HatSis
    }

    pub fn build(self, tree: &TreeConfig) -> Box<dyn IncrementalClassifier> {
        let hat = || HoeffdingAdaptiveTree::new(tree.clone());
        let ht = || HoeffdingTree::new(tree.clone());
        match self {
            Self::HatSis => Box::new(hat()),
            Self::HatDdm => Box::new(wrap_with_ddm(Box::new(hat()))),
            Self::HtDdm => Box::new(wrap_with_ddm(Box::new(ht()))),
            Self::Ht => Box::new(ht()),
        }
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown learner {s:?} (expected hat+sis, hat+ddm, ht+ddm or ht)"
                ))
            })
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Self::HatSis => "hat+sis",
            Self::HatDdm => "hat+ddm",
            Self::HtDdm => "ht+ddm",
            Self::Ht => "ht",
        })
    }
}

/// One benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub learner: LearnerKind,
    /// Name reported in the summary's `source` column.
    pub source: String,
    pub scenario: ScenarioSpec,
    pub sis: SisConfig,
    pub tree: TreeConfig,
    pub metrics_window: usize,
    pub output_dir: PathBuf,
    pub force: bool,
}

impl RunConfig {
    pub fn new(learner: LearnerKind, source: impl Into<String>, scenario: ScenarioSpec) -> Self {
        Self {
            learner,
            source: source.into(),
            scenario,
            sis: SisConfig::default(),
            tree: TreeConfig::default(),
            metrics_window: 20,
            output_dir: default_output_dir(),
            force: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.tree.validate()?;
        if self.learner.uses_sis() {
            self.sis.validate()?;
        }
        self.prequential_config().validate()
    }

    pub fn prequential_config(&self) -> PrequentialConfig {
        PrequentialConfig {
            sis: self.learner.uses_sis().then(|| self.sis.clone()),
            metrics_window: self.metrics_window,
            ..PrequentialConfig::default()
        }
    }

    /// Materializes the stream and runs the evaluation, writing nothing.
    pub fn execute(&self) -> Result<Completed, RunError> {
        self.validate()?;
        self.execute_on(self.scenario.materialize()?)
    }

    /// Like [`execute`](Self::execute) on an already built stream.
    pub fn execute_on(&self, stream: Stream) -> Result<Completed, RunError> {
        let mut learner = self.learner.build(&self.tree);
        let classes = stream.classes;
        match prequential_run(
            stream.instances,
            learner.as_mut(),
            &self.prequential_config(),
        ) {
            Ok(report) => Ok(Completed { report, classes }),
            Err(failure) => Err(RunError::Aborted {
                failure: Box::new(failure),
                classes,
            }),
        }
    }
}

/// `$SIS_BENCH_OUT`, else `sis-bench-out`.
pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("sis-bench-out"))
}

#[derive(Debug, Clone)]
pub struct Completed {
    pub report: PrequentialReport,
    pub classes: ClassSpace,
}

impl Completed {
    pub fn summary(&self, config: &RunConfig) -> SummaryRow {
        let mut row = self.report.summary(&config.source);
        row.learner = config.learner.to_string();
        row
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Setup(#[from] Error),
    #[error("{failure}")]
    Aborted {
        failure: Box<RunFailure>,
        classes: ClassSpace,
    },
}

fn failed_row(config: &RunConfig, failure: &RunFailure) -> SummaryRow {
    let mut row = failure.partial.summary(&config.source);
    row.learner = config.learner.to_string();
    row.status = format!("failed at {}: {}", failure.position, failure.source);
    row
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Refuses to touch existing files unless `force` is set.
pub fn prepare_outputs(dir: &Path, names: &[&str], force: bool) -> Result<Vec<PathBuf>> {
    let paths: Vec<PathBuf> = names.iter().map(|n| dir.join(n)).collect();
    if !force {
        if let Some(p) = paths.iter().find(|p| p.exists()) {
            return Err(Error::config(format!(
                "{} exists; pass --force to overwrite",
                p.display()
            )));
        }
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(paths)
}

fn write_outputs(
    paths: &[PathBuf],
    row: &SummaryRow,
    report: &PrequentialReport,
    classes: &ClassSpace,
) -> Result<()> {
    write_summary(create(&paths[0])?, std::slice::from_ref(row), b',')?;
    write_log(create(&paths[1])?, report, classes, b',')?;
    write_windowed(create(&paths[2])?, report, b',')
}

/// Runs one configuration and writes the summary, per-instance log and
/// windowed series into `config.output_dir`.
///
/// A run that aborts mid-stream still writes what it measured, with the
/// summary status set to the failure.
pub fn run(config: &RunConfig) -> Result<SummaryRow, RunError> {
    config.validate()?;
    let stream = config.scenario.materialize()?;
    run_on(config, stream)
}

/// [`run`] on an already built stream; `config.scenario` is ignored.
pub fn run_on(config: &RunConfig, stream: Stream) -> Result<SummaryRow, RunError> {
    config.validate()?;
    let paths = prepare_outputs(
        &config.output_dir,
        &[SUMMARY_FILE, LOG_FILE, WINDOWED_FILE],
        config.force,
    )?;
    match config.execute_on(stream) {
        Ok(done) => {
            let row = done.summary(config);
            write_outputs(&paths, &row, &done.report, &done.classes)?;
            Ok(row)
        }
        Err(RunError::Aborted { failure, classes }) => {
            let row = failed_row(config, &failure);
            write_outputs(&paths, &row, &failure.partial, &classes)?;
            Err(RunError::Aborted { failure, classes })
        }
        Err(e) => Err(e),
    }
}

/// Mean, standard deviation (n - 1), minimum and maximum of one metric
/// over the successful runs of one learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub learner: String,
    pub metric: String,
    pub runs: usize,
    pub failed: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Battery {
    pub runs: Vec<SummaryRow>,
    pub aggregates: Vec<AggregateRow>,
}

impl Battery {
    pub fn aggregate(&self, learner: &str, metric: &str) -> Option<&AggregateRow> {
        self.aggregates
            .iter()
            .find(|a| a.learner == learner && a.metric == metric)
    }
}

const METRICS: [&str; 5] = ["accuracy", "kappa", "time_s", "size_kb", "cost"];

fn metric(row: &SummaryRow, name: &str) -> f64 {
    match name {
        "accuracy" => row.accuracy,
        "kappa" => row.kappa,
        "time_s" => row.time_s,
        "size_kb" => row.size_kb,
        _ => row.cost,
    }
}

/// Runs every configuration (in parallel, one thread each, at most
/// `available_parallelism` at a time) without writing files, then
/// aggregates per learner. Failed runs are kept in `runs` and counted, not
/// averaged.
pub fn run_battery(configs: &[RunConfig]) -> Result<Battery> {
    if configs.is_empty() {
        return Err(Error::config("battery needs at least one configuration"));
    }
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut runs = Vec::with_capacity(configs.len());
    for chunk in configs.chunks(threads) {
        let rows: Vec<SummaryRow> = std::thread::scope(|s| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|cfg| s.spawn(move || battery_row(cfg)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("battery run panicked"))
                .collect()
        });
        runs.extend(rows);
    }

    let mut learners: Vec<&str> = Vec::new();
    for row in &runs {
        if !learners.contains(&row.learner.as_str()) {
            learners.push(&row.learner);
        }
    }
    let mut aggregates = Vec::new();
    for learner in learners {
        let mine: Vec<&SummaryRow> = runs.iter().filter(|r| r.learner == learner).collect();
        let ok: Vec<&SummaryRow> = mine.iter().copied().filter(|r| r.status == "ok").collect();
        for name in METRICS {
            let values: Vec<f64> = ok.iter().map(|r| metric(r, name)).collect();
            aggregates.push(describe(learner, name, &values, mine.len() - ok.len()));
        }
    }
    Ok(Battery { runs, aggregates })
}

fn battery_row(cfg: &RunConfig) -> SummaryRow {
    match cfg.execute() {
        Ok(done) => done.summary(cfg),
        Err(RunError::Aborted { failure, .. }) => failed_row(cfg, &failure),
        Err(RunError::Setup(e)) => SummaryRow {
            learner: cfg.learner.to_string(),
            source: cfg.source.clone(),
            instances: 0,
            accuracy: 0.0,
            kappa: 0.0,
            time_s: 0.0,
            size_kb: 0.0,
            cost: 0.0,
            status: format!("failed: {e}"),
        },
    }
}

fn describe(learner: &str, metric: &str, values: &[f64], failed: usize) -> AggregateRow {
    let n = values.len();
    let (mean, std, min, max) = if n == 0 {
        (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
    } else {
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (mean, std, min, max)
    };
    AggregateRow {
        learner: learner.to_string(),
        metric: metric.to_string(),
        runs: n,
        failed,
        mean,
        std,
        min,
        max,
    }
}

pub const BATTERY_RUNS_FILE: &str = "battery-runs.csv";
pub const BATTERY_AGGREGATE_FILE: &str = "battery-aggregate.csv";

/// Writes the per-run summaries and the aggregate table.
pub fn write_battery(dir: &Path, battery: &Battery, force: bool) -> Result<Vec<PathBuf>> {
    let paths = prepare_outputs(dir, &[BATTERY_RUNS_FILE, BATTERY_AGGREGATE_FILE], force)?;
    write_summary(create(&paths[0])?, &battery.runs, b',')?;
    let mut w = csv::Writer::from_writer(create(&paths[1])?);
    for row in &battery.aggregates {
        w.serialize(row)
            .map_err(|e| Error::config(format!("writing aggregate: {e}")))?;
    }
    w.flush().map_err(|e| Error::io(&paths[1], e))?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::Segment;

    fn synthetic(learner: LearnerKind, seed: u64, len: usize) -> RunConfig {
        let spec = ScenarioSpec {
            segments: vec![Segment::synthetic(0, len)],
            seed,
            ..ScenarioSpec::default()
        };
        RunConfig::new(learner, "synthetic:gaussian", spec)
    }

    #[test]
    fn learner_names_round_trip() {
        for k in LearnerKind::ALL {
            assert_eq!(k.to_string().parse::<LearnerKind>().unwrap(), k);
        }
        assert!("svm".parse::<LearnerKind>().is_err());
        assert_eq!(
            LearnerKind::HtDdm.build(&TreeConfig::default()).name(),
            "ht+ddm"
        );
    }

    #[test]
    fn run_writes_three_files_and_respects_force() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = synthetic(LearnerKind::Ht, 7, 300);
        cfg.output_dir = dir.path().to_path_buf();
        let row = run(&cfg).unwrap();
        assert_eq!(row.instances, 300);
        for name in [SUMMARY_FILE, LOG_FILE, WINDOWED_FILE] {
            assert!(dir.path().join(name).exists());
        }
        assert!(matches!(run(&cfg), Err(RunError::Setup(Error::Config(_)))));
        cfg.force = true;
        assert!(run(&cfg).is_ok());
    }

    #[test]
    fn invalid_config_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = synthetic(LearnerKind::Ht, 1, 100);
        cfg.tree.grace_period = 0;
        cfg.output_dir = dir.path().join("out");
        assert!(matches!(run(&cfg), Err(RunError::Setup(_))));
        assert!(!cfg.output_dir.exists());
    }

    #[test]
    fn aborted_run_flushes_failure_marker() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = synthetic(LearnerKind::HatSis, 2, 120);
        cfg.output_dir = dir.path().to_path_buf();
        let mut stream = cfg.scenario.materialize().unwrap();
        stream.instances[80].label = None;
        match run_on(&cfg, stream) {
            Err(RunError::Aborted { failure, .. }) => assert_eq!(failure.position, 80),
            other => panic!("unexpected {other:?}"),
        }
        let summary = std::fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap();
        assert!(summary.contains("failed at 80"));
        let log = std::fs::read_to_string(dir.path().join(LOG_FILE)).unwrap();
        assert_eq!(log.lines().count(), 81);
    }

    #[test]
    fn single_config_battery_has_zero_spread() {
        let battery = run_battery(&[synthetic(LearnerKind::Ht, 1, 200)]).unwrap();
        let acc = battery.aggregate("ht", "accuracy").unwrap();
        assert_eq!(acc.std, 0.0);
        assert_eq!(acc.mean, battery.runs[0].accuracy);
        assert_eq!(acc.min, acc.max);
    }

    #[test]
    fn battery_mean_between_extremes_and_failures_marked() {
        let mut configs: Vec<RunConfig> =
            (0..3).map(|s| synthetic(LearnerKind::Ht, s, 300)).collect();
        let mut broken = synthetic(LearnerKind::Ht, 9, 300);
        broken.scenario.segments[0].source = "/missing/file.csv".into();
        configs.push(broken);
        let battery = run_battery(&configs).unwrap();
        let acc = battery.aggregate("ht", "accuracy").unwrap();
        assert_eq!((acc.runs, acc.failed), (3, 1));
        assert!(acc.min <= acc.mean && acc.mean <= acc.max);
        assert!(battery.runs[3].status.starts_with("failed"));
        assert!(run_battery(&[]).is_err());
    }
}
