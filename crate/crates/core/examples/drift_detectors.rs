//! ADWIN and DDM on a Bernoulli error stream whose rate jumps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sis_stream::drift::{Adwin, Ddm, DriftLevel};

fn main() -> sis_stream::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut adwin = Adwin::default();
    let mut ddm = Ddm::default();
    let mut last_level = DriftLevel::InControl;
    for t in 0..2000 {
        let rate = if t < 1000 { 0.2 } else { 0.6 };
        let error = rng.random_bool(rate);
        if adwin.update(f64::from(u8::from(error)))? {
            println!(
                "t={t:>4} adwin change: width {} mean {:.3}",
                adwin.width(),
                adwin.mean()
            );
        }
        let level = ddm.update(!error);
        if level != last_level {
            println!("t={t:>4} ddm {last_level:?} -> {level:?}");
            last_level = level;
        }
    }
    println!(
        "adwin detections {}, final mean {:.3}",
        adwin.detections(),
        adwin.mean()
    );
    Ok(())
}
