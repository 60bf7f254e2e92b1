//! Groups a synthetic corpus into full-circle sweeps.

use multiaspect::dataio::{aspect_spacing, build_sequences, max_wrapped_gap, synth_generate, SynthSpec};

fn main() -> multiaspect::Result<()> {
    let spec = SynthSpec::default();
    let images = synth_generate(&spec)?;
    let set = build_sequences(images, 4, aspect_spacing(&spec))?;
    println!("{} groups, {} sequences", set.groups.len(), set.sequence_count());
    for (id, _, seq) in set.iter().take(6) {
        let aspects: Vec<f64> = seq.iter().map(|i| i.aspect_deg).collect();
        println!(
            "{id}: {} steps, {:.1}..{:.1} deg, widest gap {:.1} deg",
            seq.len(),
            aspects[0],
            aspects[aspects.len() - 1],
            max_wrapped_gap(&aspects)
        );
    }
    Ok(())
}
