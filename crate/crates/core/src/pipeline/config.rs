//! Pipeline variant switches and their TOML form.
//!
//! ```toml
//! preset = "full_ours"
//! seed = 0
//! isp_source = "default"
//!
//! [crf]
//! mode = "gamma"
//! gamma = 2.2
//!
//! [interpolation]
//! mode = "rounds"
//! rounds = 3
//!
//! [saturation]
//! mode = "ours"
//! alpha_lo = 0.25
//! alpha_hi = 1.25
//!
//! [mask]
//! threshold = 1.0
//! source = "all_frames"
//!
//! [noise]
//! mode = "poisson_gaussian_isp"
//! beta1 = 0.0001
//! beta2 = 0.0009
//! sigma_srgb = 0.0112
//! jitter_lo = 0.5
//! jitter_hi = 1.5
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::color::crf::{Crf, CrfLut};
use crate::error::{Error, Result};
use crate::noise::sampler::check_jitter;
use crate::noise::NoiseParams;

/// How frames move between sRGB samples and the averaging space.
#[derive(Debug, Clone, PartialEq)]
pub enum CrfMode {
    /// Average sRGB samples directly, no decode or encode.
    Linear,
    Curve(Crf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
enum CrfModeRepr {
    Linear,
    Gamma { gamma: f64 },
    Lut { lut_file: PathBuf },
    Knots { knots: Vec<[f64; 2]> },
}

impl CrfModeRepr {
    fn resolve(self, base: &Path) -> Result<CrfMode> {
        Ok(match self {
            CrfModeRepr::Linear => CrfMode::Linear,
            CrfModeRepr::Gamma { gamma } => CrfMode::Curve(Crf::gamma(gamma)?),
            CrfModeRepr::Lut { lut_file } => CrfMode::Curve(Crf::Lut(CrfLut::load(&base.join(lut_file))?)),
            CrfModeRepr::Knots { knots } => {
                CrfMode::Curve(Crf::Lut(CrfLut::new(knots.iter().map(|k| (k[0], k[1])))?))
            }
        })
    }
}

impl From<&CrfMode> for CrfModeRepr {
    fn from(mode: &CrfMode) -> Self {
        match mode {
            CrfMode::Linear => CrfModeRepr::Linear,
            CrfMode::Curve(Crf::Gamma(gamma)) => CrfModeRepr::Gamma { gamma: *gamma },
            CrfMode::Curve(Crf::Lut(lut)) => match lut.source() {
                Some(p) => CrfModeRepr::Lut {
                    lut_file: p.to_path_buf(),
                },
                None => CrfModeRepr::Knots {
                    knots: lut.knots().map(|(x, y)| [x, y]).collect(),
                },
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum Interpolation {
    #[default]
    Off,
    /// Built-in midpoint doubling, `rounds` times.
    Rounds { rounds: u32 },
    /// Frames were interpolated upstream and loaded as-is.
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum Saturation {
    #[default]
    Off,
    /// Additive re-saturation with `alpha ~ U(alpha_lo, alpha_hi)` per image.
    Ours { alpha_lo: f64, alpha_hi: f64 },
    /// Masked sites copied from a real blurred capture.
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskSource {
    /// Every frame that enters the average, interpolated ones included.
    #[default]
    AllFrames,
    /// Captured frames only.
    SourceFrames,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskOptions {
    /// Samples at or above this value count as saturated.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub source: MaskSource,
}

fn default_threshold() -> f64 {
    1.0
}

impl Default for MaskOptions {
    fn default() -> Self {
        Self {
            threshold: default_threshold(),
            source: MaskSource::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseMode {
    #[default]
    Off,
    /// Gaussian noise added to the final sRGB image, `sigma` jittered per image.
    Gaussian { sigma: f64, jitter_lo: f64, jitter_hi: f64 },
    /// Poisson-Gaussian noise in RAW between the inverse and forward ISP.
    PoissonGaussianIsp(NoiseParams),
}

/// Where the ISP for `poisson_gaussian_isp` comes from when driven from the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IspSource {
    /// Fall back to the identity ISP with gamma 2.2 if none is given.
    #[default]
    Default,
    /// A calibrated camera ISP must be supplied.
    Provided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Name of the preset this config came from, if any.
    pub preset: Option<String>,
    pub crf: CrfMode,
    pub interpolation: Interpolation,
    pub saturation: Saturation,
    pub mask: MaskOptions,
    pub noise: NoiseMode,
    pub isp_source: IspSource,
    pub seed: u64,
}

impl Default for PipelineConfig {
    /// Gamma 2.2 decode/encode with every optional stage off.
    fn default() -> Self {
        Self {
            preset: None,
            crf: CrfMode::Curve(Crf::Gamma(2.2)),
            interpolation: Interpolation::Off,
            saturation: Saturation::Off,
            mask: MaskOptions::default(),
            noise: NoiseMode::Off,
            isp_source: IspSource::Default,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PipelineConfigRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    isp_source: IspSource,
    #[serde(default = "default_crf_repr")]
    crf: CrfModeRepr,
    #[serde(default)]
    interpolation: Interpolation,
    #[serde(default)]
    saturation: Saturation,
    #[serde(default)]
    mask: MaskOptions,
    #[serde(default)]
    noise: NoiseMode,
}

fn default_crf_repr() -> CrfModeRepr {
    CrfModeRepr::Gamma { gamma: 2.2 }
}

impl PipelineConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Checks every numeric switch; does not know about per-sequence inputs.
    pub fn validate(&self) -> Result<()> {
        if let Saturation::Ours { alpha_lo, alpha_hi } = self.saturation {
            if !(alpha_lo.is_finite() && alpha_hi.is_finite() && 0.0 <= alpha_lo && alpha_lo <= alpha_hi) {
                return Err(Error::Config(format!(
                    "alpha range must satisfy 0 <= lo <= hi, got ({alpha_lo}, {alpha_hi})"
                )));
            }
        }
        if !(self.mask.threshold > 0.0 && self.mask.threshold <= 1.0) {
            return Err(Error::Config(format!(
                "mask threshold must lie in (0, 1], got {}",
                self.mask.threshold
            )));
        }
        match self.noise {
            NoiseMode::Off => {}
            NoiseMode::Gaussian {
                sigma,
                jitter_lo,
                jitter_hi,
            } => {
                if !(sigma.is_finite() && sigma >= 0.0) {
                    return Err(Error::Config(format!("sigma must be non-negative, got {sigma}")));
                }
                check_jitter(jitter_lo, jitter_hi)?;
            }
            NoiseMode::PoissonGaussianIsp(params) => params.validate()?,
        }
        Ok(())
    }

    pub fn uses_isp(&self) -> bool {
        matches!(self.noise, NoiseMode::PoissonGaussianIsp(_))
    }

    /// Parses a config; relative LUT paths resolve against `base`.
    pub fn from_toml_str(text: &str, base: &Path) -> Result<Self> {
        let repr: PipelineConfigRepr = toml::from_str(text).map_err(|e| Error::Parse {
            path: base.to_path_buf(),
            message: e.to_string(),
        })?;
        let cfg = Self {
            preset: repr.preset,
            crf: repr.crf.resolve(base)?,
            interpolation: repr.interpolation,
            saturation: repr.saturation,
            mask: repr.mask,
            noise: repr.noise,
            isp_source: repr.isp_source,
            seed: repr.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path.parent().unwrap_or(Path::new("."))).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    fn repr(&self) -> PipelineConfigRepr {
        PipelineConfigRepr {
            preset: self.preset.clone(),
            seed: self.seed,
            isp_source: self.isp_source,
            crf: CrfModeRepr::from(&self.crf),
            interpolation: self.interpolation,
            saturation: self.saturation,
            mask: self.mask,
            noise: self.noise,
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.repr()).expect("pipeline config is always representable")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.repr()).expect("pipeline config is always representable")
    }

    /// The config as a row of switches: CRF, interpolation, saturation, noise, ISP.
    pub fn table_row(&self) -> TableRow {
        TableRow {
            crf: match &self.crf {
                CrfMode::Linear => "Linear".into(),
                CrfMode::Curve(Crf::Gamma(g)) => format!("{g}"),
                CrfMode::Curve(Crf::Lut(_)) => "LUT".into(),
            },
            interpolation: !matches!(self.interpolation, Interpolation::Off),
            saturation: match self.saturation {
                Saturation::Off => "",
                Saturation::Ours { .. } => "Ours",
                Saturation::Oracle => "Oracle",
            },
            noise: match self.noise {
                NoiseMode::Off => "",
                NoiseMode::Gaussian { .. } => "G",
                NoiseMode::PoissonGaussianIsp(_) => "G+P",
            },
            isp: self.uses_isp(),
        }
    }
}

/// One row of switches: CRF, interpolation, saturation, noise, ISP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub crf: String,
    pub interpolation: bool,
    pub saturation: &'static str,
    pub noise: &'static str,
    pub isp: bool,
}

impl fmt::Display for TableRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tick = |b: bool| if b { "✓" } else { "" };
        write!(
            f,
            "{} | {} | {} | {} | {}",
            self.crf,
            tick(self.interpolation),
            self.saturation,
            self.noise,
            tick(self.isp)
        )
    }
}
