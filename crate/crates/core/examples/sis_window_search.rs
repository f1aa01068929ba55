//! One SIS training step at a time: ranking, window search, buffering.

use sis_stream::hoeffding::HoeffdingAdaptiveTree;
use sis_stream::sis::{SisConfig, SisEngine};
use sis_stream::stream::{GaussianConfig, ScenarioSpec, Segment};
use sis_stream::IncrementalClassifier;

fn main() -> sis_stream::Result<()> {
    let stream = ScenarioSpec {
        segments: vec![Segment::synthetic(0, 300), Segment::synthetic(1, 300)],
        seed: 5,
        gaussian: GaussianConfig {
            mean_run_length: 40.0,
            mixed_units: false,
            ..GaussianConfig::default()
        },
        ..ScenarioSpec::default()
    }
    .materialize()?;

    let mut engine = SisEngine::new(SisConfig::new(50, 1, 5, 0.1))?;
    let mut learner = HoeffdingAdaptiveTree::default();
    let mut correct = 0;
    for x in &stream.instances {
        if learner.predict_one(x)? == x.require_label()? {
            correct += 1;
        }
        let step = engine.train_step(&mut learner, x)?;
        let t = x.time_index;
        if t % 50 == 0 || (300..306).contains(&t) {
            println!(
                "t={t:>3} buffered={:>2} comparisons={:>4} window={:>2} trained={:>2} accepted={}",
                step.buffered,
                step.comparisons,
                step.window.best,
                step.window.trained,
                step.window.accepted
            );
        }
    }
    println!(
        "accuracy {:.1}% over {} instances (concept flips at t=300)",
        100.0 * correct as f64 / stream.len() as f64,
        stream.len()
    );
    println!("engine footprint {} bytes", engine.size_bytes());
    Ok(())
}
