//! Hoeffding tree and Hoeffding adaptive tree on an abrupt label flip.

use sis_stream::hoeffding::{hoeffding_bound, HoeffdingAdaptiveTree, HoeffdingTree, TreeConfig};
use sis_stream::stream::{ScenarioSpec, Segment};
use sis_stream::IncrementalClassifier;

fn main() -> sis_stream::Result<()> {
    for n in [200.0, 1000.0, 5000.0] {
        println!(
            "bound(R=1, delta=1e-7, n={n}) = {:.4}",
            hoeffding_bound(1.0, 1e-7, n)
        );
    }

    let stream = ScenarioSpec {
        segments: vec![Segment::synthetic(0, 4000), Segment::synthetic(1, 4000)],
        seed: 1,
        ..ScenarioSpec::default()
    }
    .materialize()?;

    let cfg = TreeConfig::default();
    let mut ht = HoeffdingTree::new(cfg.clone());
    let mut hat = HoeffdingAdaptiveTree::new(cfg);
    let (mut ht_ok, mut hat_ok) = (0, 0);
    for (i, x) in stream.instances.iter().enumerate() {
        let y = x.require_label()?;
        ht_ok += usize::from(ht.predict_one(x)? == y);
        hat_ok += usize::from(hat.predict_one(x)? == y);
        ht.learn_one(x)?;
        hat.learn_one(x)?;
        if (i + 1) % 1000 == 0 {
            println!(
                "after {:>4}: ht {:>5.1}% ({} nodes)   hat {:>5.1}% ({} nodes, {:?})",
                i + 1,
                ht_ok as f64 / 10.0,
                ht.node_count(),
                hat_ok as f64 / 10.0,
                hat.node_count(),
                hat.stats()
            );
            ht_ok = 0;
            hat_ok = 0;
        }
    }
    println!(
        "sizes: ht {} B, hat {} B",
        ht.size_bytes(),
        hat.size_bytes()
    );
    Ok(())
}
