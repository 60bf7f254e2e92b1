//! Retrains the desk pipeline on a fraction of each class's training
//! images. Each fraction is a full training run.
//!
//! cargo run --release --example sparse_training -- [FRACTION...]

#[path = "shared/desk.rs"]
mod desk;

use multiaspect::cli::{evaluate_records, extract_records, train_pipeline, ExperimentConfig, PipelineConfig};

fn main() -> multiaspect::Result<()> {
    let mut fractions: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().expect("fraction")).collect();
    if fractions.is_empty() {
        fractions = vec![1.0, 0.5, 0.25];
    }
    let base = PipelineConfig::from_toml(desk::DESK)?;
    let train = extract_records(&desk::train_images(), &base.features)?;
    let test = extract_records(&desk::test_images(), &base.features)?;
    for f in fractions {
        let mut cfg = base.clone();
        cfg.experiment.train_fraction = f;
        let trained = train_pipeline(train.clone(), &cfg, |_| {})?;
        let r = evaluate_records(&trained.bundle, test.clone(), &ExperimentConfig::default())?;
        println!(
            "fraction {f:.2}: sequence {:.2}%  single image {:.2}%",
            r.accuracy().unwrap_or(0.0),
            r.baseline_accuracy().unwrap_or(0.0)
        );
    }
    Ok(())
}
