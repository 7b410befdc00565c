//! Text (TOML) representation of [`IspConfig`] and CRFs.
//!
//! ```toml
//! wb_gains = [2.0, 1.0, 1.6]
//! ccm = [1.6, -0.4, -0.2, -0.2, 1.4, -0.2, 0.0, -0.5, 1.5]
//! bayer_pattern = "RGGB"
//!
//! [crf]
//! gamma = 2.2          # or: lut_file = "a7r3_crf.txt"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::color::bayer::BayerPattern;
use crate::color::crf::{Crf, CrfLut};
use crate::color::isp::{Ccm, IspConfig, WbGains};
use crate::error::{Error, Result};

/// On-disk form of a CRF. Relative `lut_file` paths are resolved against the
/// directory of the file that names them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum CrfRepr {
    Gamma { gamma: f64 },
    LutFile { lut_file: PathBuf },
    Knots { knots: Vec<[f64; 2]> },
}

impl CrfRepr {
    pub fn resolve(&self, base: &Path) -> Result<Crf> {
        match self {
            CrfRepr::Gamma { gamma } => Crf::gamma(*gamma),
            CrfRepr::LutFile { lut_file } => Ok(Crf::Lut(CrfLut::load(&base.join(lut_file))?)),
            CrfRepr::Knots { knots } => Ok(Crf::Lut(CrfLut::new(knots.iter().map(|k| (k[0], k[1])))?)),
        }
    }
}

impl From<&Crf> for CrfRepr {
    fn from(crf: &Crf) -> Self {
        match crf {
            Crf::Gamma(gamma) => CrfRepr::Gamma { gamma: *gamma },
            Crf::Lut(lut) => match lut.source() {
                Some(path) => CrfRepr::LutFile {
                    lut_file: path.to_path_buf(),
                },
                None => CrfRepr::Knots {
                    knots: lut.knots().map(|(x, y)| [x, y]).collect(),
                },
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IspConfigRepr {
    #[serde(default = "unit_gains")]
    wb_gains: [f64; 3],
    #[serde(default = "identity_ccm")]
    ccm: Vec<f64>,
    #[serde(default = "default_crf")]
    crf: CrfRepr,
    #[serde(default)]
    bayer_pattern: BayerPattern,
}

fn unit_gains() -> [f64; 3] {
    [1.0; 3]
}

fn identity_ccm() -> Vec<f64> {
    Ccm::IDENTITY.row_major().to_vec()
}

fn default_crf() -> CrfRepr {
    CrfRepr::Gamma { gamma: 2.2 }
}

impl IspConfig {
    /// Parses an ISP config; missing keys take the identity/gamma-2.2 defaults.
    pub fn from_toml_str(text: &str, base: &Path) -> Result<Self> {
        let repr: IspConfigRepr = toml::from_str(text).map_err(|e| Error::Parse {
            path: base.to_path_buf(),
            message: e.to_string(),
        })?;
        Ok(Self {
            wb_gains: WbGains::new(repr.wb_gains)?,
            ccm: Ccm::from_row_major(&repr.ccm)?,
            crf: repr.crf.resolve(base)?,
            bayer_pattern: repr.bayer_pattern,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, base).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        let repr = IspConfigRepr {
            wb_gains: self.wb_gains.get(),
            ccm: self.ccm.row_major().to_vec(),
            crf: CrfRepr::from(&self.crf),
            bayer_pattern: self.bayer_pattern,
        };
        toml::to_string(&repr).expect("ISP config is always representable")
    }
}
