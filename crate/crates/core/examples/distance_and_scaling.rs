//! Incremental standardization and the spatio-temporal distance.

use sis_stream::distance::{
    spatial_distance, spatio_temporal_distance, time_distance, DistanceParams,
};
use sis_stream::scaling::RunningScaler;
use sis_stream::Instance;

fn main() -> sis_stream::Result<()> {
    // voltage (V), current (A), frequency (Hz): wildly different units
    let raw = [
        [13_800.0, 410.0, 60.01],
        [13_790.0, 415.0, 59.99],
        [13_810.0, 405.0, 60.00],
        [12_100.0, 980.0, 59.80],
        [13_805.0, 412.0, 60.02],
    ];
    let mut scaler = RunningScaler::new();
    let mut scaled = Vec::new();
    for (t, row) in raw.iter().enumerate() {
        let x = Instance::labeled(t as u64, row.to_vec(), usize::from(t == 3))?;
        scaler.update(&x)?;
        let z = scaler.transform(&x)?;
        println!("t={t} scaled {:?}", round(&z.features));
        scaled.push(z);
    }
    println!("mean {:?}", round(scaler.mean()));
    println!("std  {:?}", round(&scaler.std()));

    let params = DistanceParams::new(200)?;
    let target = &scaled[4];
    for past in &scaled[..4] {
        println!(
            "D(x4, x{}) = {:.4}  (time {:.4} + space {:.4})",
            past.time_index,
            spatio_temporal_distance(target, past, params)?,
            time_distance(target.time_index, past.time_index, params),
            spatial_distance(&target.features, &past.features)?,
        );
    }
    Ok(())
}

fn round(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1000.0).round() / 1000.0).collect()
}
