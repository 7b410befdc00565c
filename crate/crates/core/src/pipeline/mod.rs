//! End-to-end blur synthesis and its named variants.

pub mod config;
pub mod presets;
mod synth;

pub use config::{
    CrfMode, Interpolation, IspSource, MaskOptions, MaskSource, NoiseMode, PipelineConfig,
    Saturation, TableRow,
};
pub use presets::{all_presets, preset, PRESET_NAMES};
pub use synth::{scene_streams, synthesize, Provenance, SynthesisOutput};
