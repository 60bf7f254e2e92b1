//! Accuracy of the desk model as test pixels are replaced by uniform noise.
//!
//! cargo run --release --example noise_experiment -- [MODEL_CACHE]

#[path = "shared/desk.rs"]
mod desk;

use std::path::PathBuf;

use multiaspect::cli::{evaluate_images, ExperimentConfig};

fn main() -> multiaspect::Result<()> {
    let cache = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("multiaspect-desk.mabl"), PathBuf::from);
    let bundle = desk::desk_model(&cache);
    let test = desk::test_images();
    println!("noise   sequence   single image");
    for noise in [0.0, 0.01, 0.05, 0.10, 0.15] {
        let exp = ExperimentConfig {
            noise,
            ..Default::default()
        };
        let r = evaluate_images(&bundle, test.clone(), &exp)?;
        println!(
            "{:>4.0}%   {:>7.2}%   {:>7.2}%",
            100.0 * noise,
            r.accuracy().unwrap_or(0.0),
            r.baseline_accuracy().unwrap_or(0.0)
        );
    }
    Ok(())
}
