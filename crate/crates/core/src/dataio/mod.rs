//! Dataset ingestion, multi-aspect sequence construction, the synthetic
//! target generator, and the noise and limited-aspect protocols.

mod image;
mod noise;
mod sequences;
mod synth;

pub use image::{
    encode_pgm, load_dataset, quantize, read_pgm, write_dataset, AspectImage, BitDepth, META_FILE,
    META_HEADER,
};
pub use noise::{contaminate, select_training_fraction, subsample_aspects, subsample_indices};
pub use sequences::{build_sequences, max_wrapped_gap, AspectTagged, RawSequenceSet, SequenceGroup};
pub use synth::{
    aspect_spacing, signature_sequences, synth_generate, wrapped_diff, ClassSignature, Scatterer,
    SynthSpec,
};
