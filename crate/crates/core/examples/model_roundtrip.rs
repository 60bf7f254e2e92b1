//! Saves a model, reads it back, and shows the errors for damaged files.

use multiaspect::cli::{cmd_inspect, load_model, save_model, ModelBundle, PipelineConfig};

fn main() -> multiaspect::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut config = PipelineConfig::default();
    config.model.feature_dim = 32;
    config.model.class_count = 3;
    config.mlp.hidden = 8;
    config.blstm.layer_sizes = vec![4, 2];
    let bundle = ModelBundle::zeros(config)?;
    let path = dir.path().join("model.mabl");
    save_model(&bundle, &path)?;
    println!("round trip exact: {}", load_model(&path)? == bundle);
    print!("{}", cmd_inspect(&path)?);

    let bytes = std::fs::read(&path).expect("model bytes");
    std::fs::write(&path, &bytes[..bytes.len() - 1]).expect("write");
    println!("truncated: {}", load_model(&path).unwrap_err());
    std::fs::write(&path, [b"XXXX", &bytes[4..]].concat()).expect("write");
    println!("bad magic: {}", load_model(&path).unwrap_err());
    Ok(())
}
