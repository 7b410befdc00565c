//! Named pipeline configurations.
//!
//! The first nine walk from naive averaging up to the full pipeline one
//! switch at a time. `gopro_a7r3` decodes GoPro-style sources with gamma 2.2
//! and re-encodes through a calibrated camera ISP that must be supplied.

use crate::color::crf::Crf;
use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use crate::pipeline::config::{
    CrfMode, Interpolation, IspSource, MaskOptions, NoiseMode, PipelineConfig, Saturation,
};

pub const PRESET_NAMES: [&str; 10] = [
    "naive_linear",
    "naive_gamma22",
    "gamma22_G",
    "gamma22_interp",
    "gamma22_interp_G",
    "interp_G_satOracle",
    "interp_G_satOurs",
    "full_oracle",
    "full_ours",
    "gopro_a7r3",
];

/// Doubling passes taking 9 captured frames to 65.
pub const INTERP_ROUNDS: u32 = 3;
pub const ALPHA_RANGE: (f64, f64) = (0.25, 1.25);
pub const JITTER_RANGE: (f64, f64) = (0.5, 1.5);

fn gaussian() -> NoiseMode {
    NoiseMode::Gaussian {
        sigma: NoiseParams::SIGMA_SRGB,
        jitter_lo: JITTER_RANGE.0,
        jitter_hi: JITTER_RANGE.1,
    }
}

fn poisson_gaussian() -> NoiseMode {
    NoiseMode::PoissonGaussianIsp(NoiseParams::default())
}

fn ours() -> Saturation {
    Saturation::Ours {
        alpha_lo: ALPHA_RANGE.0,
        alpha_hi: ALPHA_RANGE.1,
    }
}

/// Looks up a preset by name (ASCII case-insensitive).
pub fn preset(name: &str) -> Result<PipelineConfig> {
    let canonical = PRESET_NAMES
        .iter()
        .find(|n| n.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))?;

    let gamma = CrfMode::Curve(Crf::Gamma(2.2));
    let interp = Interpolation::Rounds {
        rounds: INTERP_ROUNDS,
    };
    let (crf, interpolation, saturation, noise) = match *canonical {
        "naive_linear" => (CrfMode::Linear, Interpolation::Off, Saturation::Off, NoiseMode::Off),
        "naive_gamma22" => (gamma, Interpolation::Off, Saturation::Off, NoiseMode::Off),
        "gamma22_G" => (gamma, Interpolation::Off, Saturation::Off, gaussian()),
        "gamma22_interp" => (gamma, interp, Saturation::Off, NoiseMode::Off),
        "gamma22_interp_G" => (gamma, interp, Saturation::Off, gaussian()),
        "interp_G_satOracle" => (gamma, interp, Saturation::Oracle, gaussian()),
        "interp_G_satOurs" => (gamma, interp, ours(), gaussian()),
        "full_oracle" => (gamma, interp, Saturation::Oracle, poisson_gaussian()),
        "full_ours" | "gopro_a7r3" => (gamma, interp, ours(), poisson_gaussian()),
        _ => unreachable!("every listed preset is matched"),
    };
    let isp_source = if *canonical == "gopro_a7r3" {
        IspSource::Provided
    } else {
        IspSource::Default
    };
    Ok(PipelineConfig {
        preset: Some(canonical.to_string()),
        crf,
        interpolation,
        saturation,
        mask: MaskOptions::default(),
        noise,
        isp_source,
        seed: 0,
    })
}

pub fn all_presets() -> Vec<PipelineConfig> {
    PRESET_NAMES
        .iter()
        .map(|n| preset(n).expect("listed presets exist"))
        .collect()
}
