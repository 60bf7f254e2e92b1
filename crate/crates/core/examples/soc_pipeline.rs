//! Trains the full pipeline on the synthetic training split and evaluates
//! it on the test split seen at another depression angle.
//!
//! cargo run --release --example soc_pipeline -- [MODEL_CACHE]

#[path = "shared/desk.rs"]
mod desk;

use std::path::PathBuf;

use multiaspect::cli::{evaluate_images, ExperimentConfig};

fn main() -> multiaspect::Result<()> {
    let cache = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("multiaspect-desk.mabl"), PathBuf::from);
    let bundle = desk::desk_model(&cache);
    let report = evaluate_images(&bundle, desk::test_images(), &ExperimentConfig::default())?;
    print!("{}", report.to_text());
    Ok(())
}
