//! Building the four evaluation scenarios and describing one in TOML.

use sis_stream::cli::{make_scenario, ScenarioName, ScenarioParams};
use sis_stream::stream::ScenarioSpec;

fn main() -> sis_stream::Result<()> {
    let sources = vec!["synthetic:gaussian".to_string()];
    let params = ScenarioParams {
        length: 2000,
        drop_at: 500,
        dropped: vec![1, 3],
        ..ScenarioParams::default()
    };
    for name in [
        ScenarioName::I,
        ScenarioName::II,
        ScenarioName::III,
        ScenarioName::IV,
    ] {
        for spec in make_scenario(name, &sources, &params)? {
            let stream = spec.materialize()?;
            let segments: Vec<String> = spec
                .segments
                .iter()
                .map(|s| format!("{}x{}", s.source, s.length.unwrap_or(0)))
                .collect();
            println!(
                "{name:<3} {:?}: {} instances, dims {}..{}, segments [{}]",
                spec.kind,
                stream.len(),
                stream.instances[0].dimension(),
                stream.instances[stream.len() - 1].dimension(),
                segments.join(", ")
            );
        }
    }

    let text = r#"
        kind = "feature-drop"
        seed = 3
        drop_at = 400
        dropped_feature_indices = [0]

        [[segments]]
        source = "gaussian"
        length = 1000

        [gaussian]
        n_classes = 3
        dimension = 6
        mean_run_length = 25.0
    "#;
    let spec = ScenarioSpec::from_toml_str(text)?;
    let stream = spec.materialize()?;
    println!(
        "\nfrom TOML: {} instances, {} classes",
        stream.len(),
        stream.classes.len()
    );
    print!("{}", spec.to_toml_string());
    Ok(())
}
