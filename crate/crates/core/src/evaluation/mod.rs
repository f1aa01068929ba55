//! Prequential evaluation and its metrics.

mod export;
mod metrics;
mod prequential;

pub use export::{write_log, write_summary, write_windowed, SummaryRow};
pub use metrics::{kappa, ram_hour_cost, windowed_accuracy, ConfusionMatrix};
pub use prequential::{
    prequential_run, thread_cpu_seconds, LogEntry, PrequentialConfig, PrequentialReport,
    RunFailure, SizeSample,
};
