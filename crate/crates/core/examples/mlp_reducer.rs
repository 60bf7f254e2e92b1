//! Trains the single-image reducer on synthetic descriptors and prints its
//! epoch log, hidden width and held-out single-image accuracy.

#[path = "shared/desk.rs"]
mod desk;

use multiaspect::cli::{extract_records, PipelineConfig};
use multiaspect::mlp::mlp_train;

fn main() -> multiaspect::Result<()> {
    let cfg = PipelineConfig::from_toml(desk::DESK)?;
    let train = extract_records(&desk::train_images(), &cfg.features)?;
    let test = extract_records(&desk::test_images(), &cfg.features)?;
    let data: Vec<(&[f64], usize)> = train.iter().map(|r| (&r.values[..], r.class_id)).collect();
    let out = mlp_train(&data, cfg.mlp.hidden, 4, &cfg.mlp.hyper)?;
    for e in &out.log {
        println!("epoch {:>3}  loss {:.4}  error {:.3}", e.epoch, e.loss, e.error_rate);
    }
    let reduced = out.params.reduce(&test[0].values)?;
    println!("{} features -> {} hidden activations", test[0].values.len(), reduced.len());
    let mut hits = 0;
    for r in &test {
        hits += (out.params.predict(&r.values)? == r.class_id) as usize;
    }
    println!("single-image test accuracy {:.2}%", 100.0 * hits as f64 / test.len() as f64);
    Ok(())
}
