//! Full descriptor of a 128x128 chip with the default configuration.

use std::time::Instant;

use multiaspect::dataio::{synth_generate, SynthSpec};
use multiaspect::features::{extract, FeatureConfig};

fn main() -> multiaspect::Result<()> {
    let spec = SynthSpec {
        image_size: 128,
        passes: 1,
        aspects_per_class: 1,
        ..SynthSpec::default()
    };
    let chip = &synth_generate(&spec)?[0];
    let cfg = FeatureConfig::default();
    let t = Instant::now();
    let f = extract(&chip.pixels, &cfg)?;
    println!("{} features in {:.2?}", f.dim(), t.elapsed());
    println!("expected {}", cfg.dim(128, 128));
    let nonzero = f.values.iter().filter(|&&v| v > 0.0).count();
    println!("{nonzero} nonzero entries, each 256-bin block sums to 1");
    Ok(())
}
