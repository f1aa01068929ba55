use serde::{Deserialize, Serialize};

use super::export::SummaryRow;
use super::metrics::{kappa, ram_hour_cost, windowed_accuracy, ConfusionMatrix};
use crate::error::{Error, Result};
use crate::hoeffding::{ClassId, IncrementalClassifier};
use crate::scaling::RunningScaler;
use crate::sis::{SisConfig, SisEngine};
use crate::stream::Instance;

/// Settings of one prequential run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PrequentialConfig {
    /// Train through SIS with this configuration; `None` trains the learner
    /// directly on each instance.
    pub sis: Option<SisConfig>,
    pub metrics_window: usize,
    /// Model size is sampled after every this many instances.
    pub size_sample_every: usize,
}

impl Default for PrequentialConfig {
    fn default() -> Self {
        Self {
            sis: None,
            metrics_window: 20,
            size_sample_every: 100,
        }
    }
}

impl PrequentialConfig {
    pub fn with_sis(sis: SisConfig) -> Self {
        Self {
            sis: Some(sis),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.metrics_window == 0 {
            return Err(Error::config("metrics window must be at least 1"));
        }
        if self.size_sample_every == 0 {
            return Err(Error::config("size sampling interval must be at least 1"));
        }
        if let Some(sis) = &self.sis {
            sis.validate()?;
        }
        Ok(())
    }
}

/// Outcome of the test step for one instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub time_index: u64,
    pub truth: ClassId,
    pub predicted: ClassId,
    pub correct: bool,
    /// Learner CPU seconds consumed so far, including this instance.
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeSample {
    /// Instances processed when the sample was taken.
    pub instances: usize,
    pub elapsed_s: f64,
    pub size_kb: f64,
}

/// Everything measured during a run. Accuracy and kappa are percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrequentialReport {
    pub learner: String,
    pub metrics_window: usize,
    pub log: Vec<LogEntry>,
    pub running_accuracy: Vec<f64>,
    pub running_kappa: Vec<f64>,
    pub windowed_accuracy: Vec<f64>,
    pub confusion: ConfusionMatrix,
    pub size_samples: Vec<SizeSample>,
    /// Learner CPU time in seconds; ingestion and bookkeeping excluded.
    pub elapsed_s: f64,
    pub size_kb: f64,
    /// KB-hours.
    pub cost: f64,
}

impl PrequentialReport {
    pub fn instances(&self) -> usize {
        self.log.len()
    }

    pub fn accuracy(&self) -> f64 {
        self.running_accuracy.last().copied().unwrap_or(0.0)
    }

    pub fn kappa(&self) -> f64 {
        self.running_kappa.last().copied().unwrap_or(0.0)
    }

    pub fn summary(&self, source: &str) -> SummaryRow {
        SummaryRow {
            learner: self.learner.clone(),
            source: source.to_string(),
            instances: self.instances(),
            accuracy: self.accuracy(),
            kappa: self.kappa(),
            time_s: self.elapsed_s,
            size_kb: self.size_kb,
            cost: self.cost,
            status: "ok".into(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))
    }
}

/// A run that stopped early, with everything measured up to that point.
#[derive(Debug, thiserror::Error)]
#[error("run aborted at stream position {position}: {source}")]
pub struct RunFailure {
    pub position: usize,
    #[source]
    pub source: Error,
    pub partial: Box<PrequentialReport>,
}

/// CPU time consumed by the calling thread, in seconds.
pub fn thread_cpu_seconds() -> f64 {
    let mut ts = libc::timespec {
        tv_sec: 0,
        tv_nsec: 0,
    };
    // SAFETY: `ts` is a valid out-pointer for the duration of the call.
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_THREAD_CPUTIME_ID, &mut ts) };
    if rc != 0 {
        return 0.0;
    }
    ts.tv_sec as f64 + ts.tv_nsec as f64 * 1e-9
}

/// Test-then-train over `stream`.
///
/// Each instance updates the scaler, is scaled, predicted, scored and then
/// used for training, either directly or through SIS. When the feature
/// layout changes the scaler keeps the surviving columns and the learner is
/// reset, since its splits refer to the old layout.
pub fn prequential_run<I>(
    stream: I,
    learner: &mut dyn IncrementalClassifier,
    cfg: &PrequentialConfig,
) -> Result<PrequentialReport, RunFailure>
where
    I: IntoIterator<Item = Instance>,
{
    let mut run = Run::new(learner, cfg);
    if let Err(source) = cfg.validate() {
        return Err(run.fail(0, source));
    }
    let mut engine = match cfg.sis.clone().map(SisEngine::new).transpose() {
        Ok(engine) => engine,
        Err(source) => return Err(run.fail(0, source)),
    };
    run.sample_size(engine.as_ref());
    for (position, x) in stream.into_iter().enumerate() {
        if let Err(source) = run.step(&x, engine.as_mut()) {
            return Err(run.fail(position, source));
        }
        if run.log.len().is_multiple_of(cfg.size_sample_every) {
            run.sample_size(engine.as_ref());
        }
    }
    if run.samples.last().map(|s| s.instances) != Some(run.log.len()) {
        run.sample_size(engine.as_ref());
    }
    Ok(run.finish())
}

struct Run<'a> {
    learner: &'a mut dyn IncrementalClassifier,
    cfg: &'a PrequentialConfig,
    scaler: RunningScaler,
    layout: Option<Instance>,
    confusion: ConfusionMatrix,
    log: Vec<LogEntry>,
    running_accuracy: Vec<f64>,
    running_kappa: Vec<f64>,
    samples: Vec<SizeSample>,
    elapsed: f64,
}

impl<'a> Run<'a> {
    fn new(learner: &'a mut dyn IncrementalClassifier, cfg: &'a PrequentialConfig) -> Self {
        Self {
            learner,
            cfg,
            scaler: RunningScaler::new(),
            layout: None,
            confusion: ConfusionMatrix::new(),
            log: Vec::new(),
            running_accuracy: Vec::new(),
            running_kappa: Vec::new(),
            samples: Vec::new(),
            elapsed: 0.0,
        }
    }

    fn step(&mut self, x: &Instance, engine: Option<&mut SisEngine>) -> Result<()> {
        let truth = x.require_label()?;
        self.track_layout(x)?;
        self.scaler.update(x)?;
        let z = self.scaler.transform(x)?;

        let start = thread_cpu_seconds();
        let predicted = self.learner.predict_one(&z);
        self.elapsed += thread_cpu_seconds() - start;
        let predicted = predicted?;

        self.confusion.record(truth, predicted);
        self.log.push(LogEntry {
            time_index: x.time_index,
            truth,
            predicted,
            correct: truth == predicted,
            elapsed_s: self.elapsed,
        });
        self.running_accuracy
            .push(100.0 * self.confusion.correct() as f64 / self.confusion.total() as f64);
        self.running_kappa.push(100.0 * kappa(&self.confusion)?);

        let start = thread_cpu_seconds();
        let trained = match engine {
            Some(engine) => engine.train_step(self.learner, &z).map(drop),
            None => self.learner.learn_one(&z),
        };
        self.elapsed += thread_cpu_seconds() - start;
        if let Some(last) = self.log.last_mut() {
            last.elapsed_s = self.elapsed;
        }
        trained
    }

    fn track_layout(&mut self, x: &Instance) -> Result<()> {
        let changed = match &self.layout {
            None => true,
            Some(prev) => prev.dimension() != x.dimension() || prev.feature_keys != x.feature_keys,
        };
        if !changed {
            return Ok(());
        }
        if let Some(prev) = &self.layout {
            let positions = prev.positions_for(x)?;
            self.scaler.restrict(&positions)?;
            self.learner.reset();
        }
        self.layout = Some(x.clone());
        Ok(())
    }

    fn sample_size(&mut self, engine: Option<&SisEngine>) {
        let bytes = self.learner.size_bytes() + engine.map_or(0, SisEngine::size_bytes);
        self.samples.push(SizeSample {
            instances: self.log.len(),
            elapsed_s: self.elapsed,
            size_kb: bytes as f64 / 1024.0,
        });
    }

    fn fail(mut self, position: usize, source: Error) -> RunFailure {
        if self.samples.is_empty() {
            self.sample_size(None);
        }
        RunFailure {
            position,
            source,
            partial: Box::new(self.finish()),
        }
    }

    fn finish(self) -> PrequentialReport {
        let correct: Vec<bool> = self.log.iter().map(|e| e.correct).collect();
        let window = self.cfg.metrics_window.max(1);
        let sizes: Vec<f64> = self.samples.iter().map(|s| s.size_kb).collect();
        let times: Vec<f64> = self.samples.iter().map(|s| s.elapsed_s).collect();
        PrequentialReport {
            learner: self.learner.name(),
            metrics_window: window,
            windowed_accuracy: windowed_accuracy(&correct, window),
            log: self.log,
            running_accuracy: self.running_accuracy,
            running_kappa: self.running_kappa,
            confusion: self.confusion,
            size_kb: sizes.last().copied().unwrap_or(0.0),
            cost: ram_hour_cost(&sizes, &times).unwrap_or(0.0),
            size_samples: self.samples,
            elapsed_s: self.elapsed,
        }
    }
}
