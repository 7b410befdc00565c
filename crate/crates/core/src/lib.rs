//! Realistic motion-blur synthesis from sequences of sharp frames.
//!
//! Blur is formed the way a camera forms it: sharp frames are (optionally)
//! temporally up-sampled, decoded to linear intensity and averaged, saturated
//! highlights are put back, and the result is pushed through a simulated
//! camera (inverse ISP, Poisson-Gaussian sensor noise, forward ISP) before
//! being encoded as sRGB again. Each of those stages can be switched off to
//! produce the simpler synthesis schemes used by older datasets.
//!
//! ```
//! use blursynth::{preset, synthesize, Image, IspConfig, SharpSequence, Srgb};
//!
//! let frames: Vec<Image<Srgb>> = (0..9)
//!     .map(|i| Image::from_fn(8, 8, |x, _, _| ((x + i) % 8) as f64 / 8.0))
//!     .collect();
//! let seq = SharpSequence::centered(frames)?;
//! let out = synthesize(&seq, &preset("full_ours")?, Some(&IspConfig::default()))?;
//! assert_eq!(out.provenance.frames_averaged, 65);
//! # Ok::<(), blursynth::Error>(())
//! ```

pub mod blur;
pub mod color;
pub mod dataset;
mod error;
pub mod image;
pub mod io;
pub mod noise;
pub mod pipeline;

pub use blur::{SaturationMask, SharpSequence};
pub use color::{Crf, IspConfig};
pub use error::{Error, Result};
pub use image::{BayerRaw, CameraRgb, Image, LinearSrgb, Srgb, Stage, StageKind};
pub use noise::NoiseParams;
pub use pipeline::{preset, synthesize, PipelineConfig, SynthesisOutput};
