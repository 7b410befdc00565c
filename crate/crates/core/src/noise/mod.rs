//! Sensor noise synthesis and calibration.

pub mod calibrate;
pub mod rng;
pub mod sampler;

pub use calibrate::{calibrate_beta1, calibrate_beta1_with, calibrate_beta2, fit_line, patch_statistics};
pub use rng::{NoiseRng, StreamId};
pub use sampler::{
    add_gaussian, add_poisson_gaussian, add_poisson_gaussian_with, jitter, NoiseParams,
    PoissonSampler,
};
