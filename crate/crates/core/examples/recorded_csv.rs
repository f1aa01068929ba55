//! Reading a recorded stream file, evaluating HAT+SIS on it and exporting
//! the three report tables.

use std::io::Write;

use sis_stream::evaluation::{
    prequential_run, write_log, write_summary, write_windowed, PrequentialConfig,
};
use sis_stream::hoeffding::HoeffdingAdaptiveTree;
use sis_stream::sis::SisConfig;
use sis_stream::stream::{read_recorded_stream, ClassSpace, CsvSchema};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("sis-stream-recorded-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("events.csv");
    let mut f = std::fs::File::create(&path)?;
    writeln!(f, "phase_angle,magnitude,freq,relay_log,marker")?;
    for t in 0..1500u32 {
        let event = ["normal", "line_fault", "normal", "injection"][(t / 75 % 4) as usize];
        let shift = match event {
            "line_fault" => 2.5,
            "injection" => -2.0,
            _ => 0.0,
        };
        let wobble = f64::from((t * 7919) % 97) / 97.0;
        let log = if event == "injection" { "inf" } else { "0" };
        writeln!(
            f,
            "{:.3},{:.1},{:.4},{log},{event}",
            shift + wobble,
            14_000.0 - 300.0 * shift + 50.0 * wobble,
            60.0 + 0.01 * wobble,
        )?;
    }
    drop(f);

    let schema = CsvSchema {
        has_header: true,
        non_finite: Some(1.0),
        ..CsvSchema::default()
    };
    let mut classes = ClassSpace::new();
    let stream = read_recorded_stream(&path, &schema, &mut classes)?;
    println!(
        "read {} instances, classes {:?}",
        stream.len(),
        classes.labels()
    );

    let mut hat = HoeffdingAdaptiveTree::default();
    let report = prequential_run(
        stream,
        &mut hat,
        &PrequentialConfig::with_sis(SisConfig::new(200, 1, 10, 0.1)),
    )?;
    println!(
        "accuracy {:.2}%, kappa {:.2}%, learner cpu {:.3}s, size {:.1} KB, cost {:.2e} KB-h",
        report.accuracy(),
        report.kappa(),
        report.elapsed_s,
        report.size_kb,
        report.cost
    );

    write_summary(
        std::fs::File::create(dir.join("summary.csv"))?,
        &[report.summary("events.csv")],
        b',',
    )?;
    write_log(
        std::fs::File::create(dir.join("log.csv"))?,
        &report,
        &classes,
        b',',
    )?;
    write_windowed(
        std::fs::File::create(dir.join("windowed.csv"))?,
        &report,
        b',',
    )?;
    println!("reports written to {}", dir.display());
    Ok(())
}
