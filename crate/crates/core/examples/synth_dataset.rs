//! Writes the default synthetic corpus and shows where the confusable
//! pair looks alike.
//!
//! cargo run --release --example synth_dataset -- [OUT_DIR]

use std::path::PathBuf;

use multiaspect::dataio::{load_dataset, synth_generate, write_dataset, BitDepth, SynthSpec};

fn main() -> multiaspect::Result<()> {
    let out = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("multiaspect-synth"), PathBuf::from);
    let spec = SynthSpec::default();
    let images = synth_generate(&spec)?;
    write_dataset(&out, &images, BitDepth::Sixteen)?;
    let back = load_dataset(&out)?;
    println!("{} images in {}", back.len(), out.display());

    println!("aspect  lobe returns per class (classes 0 and 1 share a body)");
    for aspect in [0.0, 30.0, 60.0, 120.0, 210.0, 300.0] {
        let lobes: Vec<String> = (0..spec.class_count)
            .map(|c| format!("{:.3}", spec.amplitude_profile(c, aspect).last().unwrap()))
            .collect();
        println!("{aspect:>6}  {}", lobes.join("  "));
    }
    Ok(())
}
