use std::io::Write;

use serde::{Deserialize, Serialize};

use super::prequential::PrequentialReport;
use crate::error::{Error, Result};
use crate::stream::ClassSpace;

/// One line of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub learner: String,
    pub source: String,
    pub instances: usize,
    pub accuracy: f64,
    pub kappa: f64,
    pub time_s: f64,
    pub size_kb: f64,
    pub cost: f64,
    pub status: String,
}

fn to_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io("<output>", source),
        other => Error::config(format!("{other:?}")),
    }
}

fn writer<W: Write>(out: W, delimiter: u8) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(out)
}

/// Header plus one line per row.
pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow], delimiter: u8) -> Result<()> {
    let mut w = writer(out, delimiter);
    if rows.is_empty() {
        w.write_record([
            "learner",
            "source",
            "instances",
            "accuracy",
            "kappa",
            "time_s",
            "size_kb",
            "cost",
            "status",
        ])
        .map_err(to_error)?;
    }
    for row in rows {
        w.serialize(row).map_err(to_error)?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))
}

/// Per-instance log with class names resolved through `classes`.
pub fn write_log<W: Write>(
    out: W,
    report: &PrequentialReport,
    classes: &ClassSpace,
    delimiter: u8,
) -> Result<()> {
    let mut w = writer(out, delimiter);
    w.write_record(["time_index", "true", "predicted", "correct", "elapsed_s"])
        .map_err(to_error)?;
    for e in &report.log {
        w.write_record([
            e.time_index.to_string(),
            classes.display(e.truth),
            classes.display(e.predicted),
            u8::from(e.correct).to_string(),
            e.elapsed_s.to_string(),
        ])
        .map_err(to_error)?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))
}

/// Plot-ready series: step, windowed accuracy, running accuracy, running
/// kappa.
pub fn write_windowed<W: Write>(out: W, report: &PrequentialReport, delimiter: u8) -> Result<()> {
    let mut w = writer(out, delimiter);
    w.write_record([
        "time_index",
        &format!("windowed_accuracy_{}", report.metrics_window),
        "running_accuracy",
        "running_kappa",
    ])
    .map_err(to_error)?;
    for (t, e) in report.log.iter().enumerate() {
        w.write_record([
            e.time_index.to_string(),
            report.windowed_accuracy[t].to_string(),
            report.running_accuracy[t].to_string(),
            report.running_kappa[t].to_string(),
        ])
        .map_err(to_error)?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::{prequential_run, PrequentialConfig};
    use crate::hoeffding::MajorityClass;
    use crate::stream::Instance;

    fn report() -> (PrequentialReport, ClassSpace) {
        let mut classes = ClassSpace::new();
        let a = classes.intern("normal");
        let b = classes.intern("fault");
        let stream: Vec<Instance> = (0..5)
            .map(|t| Instance::labeled(t, vec![t as f64], if t < 3 { a } else { b }).unwrap())
            .collect();
        let r = prequential_run(
            stream,
            &mut MajorityClass::new(),
            &PrequentialConfig::default(),
        )
        .unwrap();
        (r, classes)
    }

    #[test]
    fn log_has_header_and_names() {
        let (r, classes) = report();
        let mut buf = Vec::new();
        write_log(&mut buf, &r, &classes, b',').unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0], "time_index,true,predicted,correct,elapsed_s");
        assert!(lines[4].starts_with("3,fault,normal,0,"));
    }

    #[test]
    fn summary_and_series() {
        let (r, _) = report();
        let mut buf = Vec::new();
        write_summary(&mut buf, &[r.summary("mem")], b'\t').unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("learner\tsource\tinstances\taccuracy\tkappa"));
        assert_eq!(text.lines().count(), 2);

        let mut buf = Vec::new();
        write_windowed(&mut buf, &r, b',').unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("time_index,windowed_accuracy_20,"));
        assert_eq!(text.lines().count(), 6);
    }
}
