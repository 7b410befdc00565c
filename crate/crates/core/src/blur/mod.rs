//! Temporal blur formation: frame interpolation, averaging, saturation.

mod average;
pub mod saturation;
pub mod sequence;

pub use average::average_frames;
pub use saturation::{apply_oracle_saturation, apply_saturation, saturation_mask, SaturationMask};
pub use sequence::{
    expand_sequence, interpolate_midpoint, load_external_frames, FrameInterpolator,
    MidpointInterpolator, SequenceManifest, SharpSequence, SEQUENCE_MANIFEST,
};
