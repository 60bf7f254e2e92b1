#![allow(dead_code)]

// Desk-scale model shared by the experiment examples.

use std::path::Path;

use multiaspect::cli::{extract_records, load_model, save_model, train_pipeline, ModelBundle, PipelineConfig};
use multiaspect::dataio::{synth_generate, AspectImage, SynthSpec};

pub const DESK: &str = include_str!("../../../../configs/desk.toml");
const SYNTH_TRAIN: &str = include_str!("../../../../configs/synth_train.toml");
const SYNTH_TEST: &str = include_str!("../../../../configs/synth_test.toml");

pub fn split(text: &str) -> Vec<AspectImage> {
    let spec: SynthSpec = toml::from_str(text).expect("synthetic spec");
    synth_generate(&spec).expect("synthetic data")
}

pub fn train_images() -> Vec<AspectImage> {
    split(SYNTH_TRAIN)
}

pub fn test_images() -> Vec<AspectImage> {
    split(SYNTH_TEST)
}

/// Loads `cache` if it exists, otherwise trains on the synthetic training
/// split with the desk config and saves there.
pub fn desk_model(cache: &Path) -> ModelBundle {
    if cache.exists() {
        println!("using cached model {}", cache.display());
        return load_model(cache).expect("cached model");
    }
    let config = PipelineConfig::from_toml(DESK).unwrap();
    println!("training desk model (a few minutes)...");
    let records = extract_records(&train_images(), &config.features).unwrap();
    let trained = train_pipeline(records, &config, |e| {
        let line = e.line();
        if !line.starts_with("blstm") || line.contains("0 loss") {
            println!("  {line}");
        }
    })
    .unwrap();
    save_model(&trained.bundle, cache).unwrap();
    trained.bundle.rounded()
}
