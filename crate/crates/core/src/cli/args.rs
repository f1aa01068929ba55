use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use super::{
    is_synthetic_source, make_scenario, parse_range, run, run_battery, write_battery, LearnerKind,
    RunConfig, ScenarioName, ScenarioParams, OUTPUT_DIR_ENV,
};
use crate::error::{Error, Result};
use crate::hoeffding::TreeConfig;
use crate::sis::SisConfig;
use crate::stream::{CsvSchema, GaussianConfig, ScenarioSpec};

#[derive(Debug, Parser)]
#[command(
    name = "sis-bench",
    version,
    about = "Prequential benchmark for drifting streams"
)]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one learner on one scenario.
    Run(RunArgs),
    /// Evaluate several learners, sources and seeds and aggregate.
    Battery(BatteryArgs),
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// hat+sis, hat+ddm, ht+ddm or ht.
    #[arg(long)]
    pub learner: LearnerKind,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, clap::Args)]
pub struct BatteryArgs {
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "hat+sis,hat+ddm,ht+ddm,ht"
    )]
    pub learners: Vec<LearnerKind>,
    /// Seeds to repeat each run with; defaults to `--seed`.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Stream file, or `synthetic:gaussian`. Repeat for multi-source
    /// scenarios; in a battery, I and III run once per source.
    #[arg(long)]
    pub source: Vec<String>,
    /// I (replay), II (fault/normal/fault), III (feature drop), IV (swap).
    #[arg(long, default_value = "I")]
    pub scenario: ScenarioName,
    /// Scenario description file; replaces --source and --scenario.
    #[arg(long, conflicts_with_all = ["source"])]
    pub scenario_file: Option<PathBuf>,
    /// Row range START..END of a file segment, in segment order.
    #[arg(long)]
    pub segment: Vec<String>,
    #[arg(long, default_value_t = 500)]
    pub drop_at: u64,
    /// Feature columns removed at --drop-at.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub drop: Vec<usize>,
    /// Length of synthetic streams.
    #[arg(long, default_value_t = 5000)]
    pub length: usize,
    /// Mean label run length of synthetic streams.
    #[arg(long)]
    pub run_length: Option<f64>,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    #[arg(long)]
    pub header: bool,
    /// Value substituted for inf/NaN cells instead of rejecting them.
    #[arg(long)]
    pub non_finite: Option<f64>,
    /// SIS buffer capacity.
    #[arg(long = "N", default_value_t = 200)]
    pub capacity: usize,
    /// SIS trial set size.
    #[arg(long = "k", default_value_t = 1)]
    pub trial_k: usize,
    /// SIS window search radius.
    #[arg(long = "r", default_value_t = 10)]
    pub radius: usize,
    /// SIS trial error threshold.
    #[arg(long = "eps", default_value_t = 0.1)]
    pub error_threshold: f64,
    #[arg(long, default_value_t = 200)]
    pub grace: u32,
    /// Split confidence.
    #[arg(long, default_value_t = 1e-7)]
    pub delta: f64,
    /// Tie threshold.
    #[arg(long, default_value_t = 0.05)]
    pub tau: f64,
    #[arg(long, default_value_t = 20)]
    pub metrics_window: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = OUTPUT_DIR_ENV, default_value = "sis-bench-out")]
    pub out: PathBuf,
    /// Overwrite existing output files.
    #[arg(long)]
    pub force: bool,
}

impl CommonArgs {
    pub fn scenario_params(&self, seed: u64) -> Result<ScenarioParams> {
        let mut gaussian = GaussianConfig::default();
        if let Some(run) = self.run_length {
            gaussian.mean_run_length = run;
        }
        Ok(ScenarioParams {
            segments: self
                .segment
                .iter()
                .map(|s| parse_range(s))
                .collect::<Result<_>>()?,
            drop_at: self.drop_at,
            dropped: self.drop.clone(),
            length: self.length,
            seed,
            schema: CsvSchema {
                delimiter: self.delimiter,
                has_header: self.header,
                feature_count: None,
                non_finite: self.non_finite,
            },
            gaussian,
        })
    }

    /// `(source label, spec)` pairs for the given sources and seed.
    fn specs(&self, sources: &[String], seed: u64) -> Result<Vec<(String, ScenarioSpec)>> {
        if let Some(path) = &self.scenario_file {
            let mut spec = ScenarioSpec::load(path)?;
            spec.seed = seed;
            return Ok(vec![(path.display().to_string(), spec)]);
        }
        let specs = make_scenario(self.scenario, sources, &self.scenario_params(seed)?)?;
        let label = |spec: &ScenarioSpec| -> String {
            let mut names: Vec<&str> = Vec::new();
            for seg in &spec.segments {
                if names.last() != Some(&seg.source.as_str()) {
                    names.push(&seg.source);
                }
            }
            if sources.iter().all(|s| is_synthetic_source(s)) {
                format!("{}[{}]", sources[0], self.scenario)
            } else {
                format!("{}[{}]", names.join(">"), self.scenario)
            }
        };
        Ok(specs
            .into_iter()
            .enumerate()
            .map(|(i, spec)| {
                let mut name = label(&spec);
                if self.scenario == ScenarioName::IV {
                    name.push_str(&format!("#{}", i + 1));
                }
                (name, spec)
            })
            .collect())
    }

    /// One configuration per spec produced for `learner` and `seed`.
    pub fn configs(&self, learner: LearnerKind, seed: u64) -> Result<Vec<RunConfig>> {
        self.configs_for(&self.source, learner, seed)
    }

    fn configs_for(
        &self,
        sources: &[String],
        learner: LearnerKind,
        seed: u64,
    ) -> Result<Vec<RunConfig>> {
        let specs = self.specs(sources, seed)?;
        let many = specs.len() > 1;
        Ok(specs
            .into_iter()
            .enumerate()
            .map(|(i, (name, spec))| RunConfig {
                learner,
                source: name,
                scenario: spec,
                sis: SisConfig::new(
                    self.capacity,
                    self.trial_k,
                    self.radius,
                    self.error_threshold,
                ),
                tree: TreeConfig {
                    grace_period: self.grace,
                    split_confidence: self.delta,
                    tie_threshold: self.tau,
                    ..TreeConfig::default()
                },
                metrics_window: self.metrics_window,
                output_dir: if many {
                    self.out.join(format!("order-{}", i + 1))
                } else {
                    self.out.clone()
                },
                force: self.force,
            })
            .collect())
    }
}

impl BatteryArgs {
    /// Learners × sources × seeds. Scenarios I and III treat each source
    /// as a separate run.
    pub fn configs(&self) -> Result<Vec<RunConfig>> {
        let c = &self.common;
        let seeds = if self.seeds.is_empty() {
            vec![c.seed]
        } else {
            self.seeds.clone()
        };
        let groups: Vec<Vec<String>> = match c.scenario {
            _ if c.scenario_file.is_some() => vec![Vec::new()],
            ScenarioName::I | ScenarioName::III => {
                c.source.iter().map(|s| vec![s.clone()]).collect()
            }
            _ => vec![c.source.clone()],
        };
        let mut out = Vec::new();
        for &learner in &self.learners {
            for group in &groups {
                for &seed in &seeds {
                    out.extend(c.configs_for(group, learner, seed)?);
                }
            }
        }
        Ok(out)
    }
}

fn execute(args: Args) -> Result<String> {
    match args.command {
        Command::Run(a) => {
            if a.common.source.is_empty() && a.common.scenario_file.is_none() {
                return Err(Error::config("--source or --scenario-file is required"));
            }
            let mut lines = Vec::new();
            for cfg in a.common.configs(a.learner, a.common.seed)? {
                let row = run(&cfg).map_err(|e| Error::config(e.to_string()))?;
                lines.push(format!(
                    "{} {} accuracy={:.2}% kappa={:.2}% time={:.3}s size={:.1}KB cost={:.3e} -> {}",
                    row.learner,
                    row.source,
                    row.accuracy,
                    row.kappa,
                    row.time_s,
                    row.size_kb,
                    row.cost,
                    cfg.output_dir.display()
                ));
            }
            Ok(lines.join("\n"))
        }
        Command::Battery(b) => {
            if b.common.source.is_empty() && b.common.scenario_file.is_none() {
                return Err(Error::config("--source or --scenario-file is required"));
            }
            let battery = run_battery(&b.configs()?)?;
            write_battery(&b.common.out, &battery, b.common.force)?;
            let mut lines: Vec<String> = battery
                .aggregates
                .iter()
                .filter(|a| a.metric == "accuracy" || a.metric == "kappa")
                .map(|a| {
                    format!(
                        "{} {}: mean={:.3} std={:.3} min={:.3} max={:.3} runs={} failed={}",
                        a.learner, a.metric, a.mean, a.std, a.min, a.max, a.runs, a.failed
                    )
                })
                .collect();
            lines.push(format!("-> {}", b.common.out.display()));
            Ok(lines.join("\n"))
        }
    }
}

/// Parses `args` (program name first), runs, and reports on stdout/stderr.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(args) {
        Ok(text) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("sis-bench: {e}");
            ExitCode::FAILURE
        }
    }
}
