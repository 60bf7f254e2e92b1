//! Three-patch LBP codes of a synthetic chip, their block histograms, and
//! the code image's invariance to an additive offset.

use multiaspect::dataio::{synth_generate, SynthSpec};
use multiaspect::features::{block_histograms, tplbp_encode, TplbpParams};

fn main() -> multiaspect::Result<()> {
    let spec = SynthSpec {
        passes: 1,
        aspects_per_class: 4,
        ..SynthSpec::default()
    };
    let chip = &synth_generate(&spec)?[0];
    let p = TplbpParams::default();
    println!("ring offsets {:?}", p.ring_offsets());
    let codes = tplbp_encode(&chip.pixels, &p)?;
    let mut distinct: Vec<u32> = codes.data().to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    println!("{}x{} codes, {} distinct values", codes.rows(), codes.cols(), distinct.len());

    let hist = block_histograms(&codes, p.block_size, p.bins())?;
    println!("{} blocks of {} bins", hist.len() / p.bins(), p.bins());
    for (b, block) in hist.chunks(p.bins()).enumerate() {
        let top = block.iter().cloned().fold(0.0, f64::max);
        println!("  block {b}: largest bin share {top:.3}");
    }

    let brighter = chip.pixels.map(|v| v + 0.25);
    let same = tplbp_encode(&brighter, &p)? == codes;
    println!("codes unchanged by +0.25 offset: {same}");
    Ok(())
}
