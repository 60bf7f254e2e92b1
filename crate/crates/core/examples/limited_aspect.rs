//! The limited-aspect protocol: test sweeps cut to an aspect range and
//! thinned to a minimum spacing.
//!
//! cargo run --release --example limited_aspect -- [MODEL_CACHE]

#[path = "shared/desk.rs"]
mod desk;

use std::path::PathBuf;

use multiaspect::cli::{evaluate_records, extract_records, ExperimentConfig};

fn main() -> multiaspect::Result<()> {
    let cache = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("multiaspect-desk.mabl"), PathBuf::from);
    let bundle = desk::desk_model(&cache);
    let records = extract_records(&desk::test_images(), &bundle.config.features)?;
    println!("range     interval  images/sweep  accuracy");
    for (hi, interval) in [(360.0, 6.0), (180.0, 6.0), (360.0, 60.0), (360.0, 90.0), (180.0, 30.0), (180.0, 45.0)] {
        let exp = ExperimentConfig {
            aspect_range: Some([0.0, hi]),
            aspect_interval: Some(interval),
            ..Default::default()
        };
        let r = evaluate_records(&bundle, records.clone(), &exp)?;
        println!(
            "0-{hi:<5}  {interval:>5}     {:>8.1}     {:>6.2}%",
            r.total() as f64 / r.sequences.max(1) as f64,
            r.accuracy().unwrap_or(0.0)
        );
    }
    Ok(())
}
