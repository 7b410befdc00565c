//! White balance, color correction, and the composed camera ISP.

use crate::color::bayer::{demosaic_bilinear, mosaic, BayerPattern};
use crate::color::crf::{linear_to_srgb, Crf};
use crate::error::{Error, Result};
use crate::image::{BayerRaw, CameraRgb, Image, LinearSrgb, Srgb};

/// Per-channel (R, G, B) white-balance multipliers, all strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WbGains([f64; 3]);

impl WbGains {
    pub const UNIT: WbGains = WbGains([1.0; 3]);

    pub fn new(gains: [f64; 3]) -> Result<Self> {
        if gains.iter().all(|g| g.is_finite() && *g > 0.0) {
            Ok(Self(gains))
        } else {
            Err(Error::Config(format!(
                "white-balance gains must be positive, got {gains:?}"
            )))
        }
    }

    pub fn get(&self) -> [f64; 3] {
        self.0
    }

    #[inline]
    fn apply(&self, c: usize, v: f64, inverse: bool) -> f64 {
        if inverse {
            v / self.0[c]
        } else {
            v * self.0[c]
        }
    }
}

impl Default for WbGains {
    fn default() -> Self {
        Self::UNIT
    }
}

const MIN_DET: f64 = 1e-8;

/// 3x3 color correction matrix (camera RGB -> linear sRGB) with its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ccm {
    forward: [[f64; 3]; 3],
    inverse: [[f64; 3]; 3],
}

impl Ccm {
    pub const IDENTITY: Ccm = Ccm {
        forward: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        inverse: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        if m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Config("color matrix has non-finite entries".into()));
        }
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        let det = m[0][0] * cof(1, 2, 1, 2) - m[0][1] * cof(1, 2, 0, 2) + m[0][2] * cof(1, 2, 0, 1);
        if det.abs() <= MIN_DET {
            return Err(Error::Config(format!(
                "color matrix is singular (|det| = {:e})",
                det.abs()
            )));
        }
        // adjugate / det
        let inverse = [
            [cof(1, 2, 1, 2) / det, -cof(0, 2, 1, 2) / det, cof(0, 1, 1, 2) / det],
            [-cof(1, 2, 0, 2) / det, cof(0, 2, 0, 2) / det, -cof(0, 1, 0, 2) / det],
            [cof(1, 2, 0, 1) / det, -cof(0, 2, 0, 1) / det, cof(0, 1, 0, 1) / det],
        ];
        Ok(Self { forward: m, inverse })
    }

    /// Row-major entries.
    pub fn from_row_major(v: &[f64]) -> Result<Self> {
        if v.len() != 9 {
            return Err(Error::Config(format!(
                "color matrix needs 9 entries, got {}",
                v.len()
            )));
        }
        Self::new([[v[0], v[1], v[2]], [v[3], v[4], v[5]], [v[6], v[7], v[8]]])
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.forward
    }

    pub fn inverse_matrix(&self) -> [[f64; 3]; 3] {
        self.inverse
    }

    pub fn row_major(&self) -> [f64; 9] {
        let m = self.forward;
        [m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2]]
    }
}

impl Default for Ccm {
    fn default() -> Self {
        Self::IDENTITY
    }
}

fn transform(data: &[f64], m: &[[f64; 3]; 3]) -> Vec<f64> {
    data.chunks_exact(3)
        .flat_map(|p| {
            [
                m[0][0] * p[0] + m[0][1] * p[1] + m[0][2] * p[2],
                m[1][0] * p[0] + m[1][1] * p[1] + m[1][2] * p[2],
                m[2][0] * p[0] + m[2][1] * p[1] + m[2][2] * p[2],
            ]
        })
        .collect()
}

/// Multiplies (or, with `inverse`, divides) each channel by its gain.
pub fn apply_wb(img: &Image<CameraRgb>, gains: &WbGains, inverse: bool) -> Image<CameraRgb> {
    let data = img
        .data()
        .iter()
        .enumerate()
        .map(|(i, &v)| gains.apply(i % 3, v, inverse))
        .collect();
    Image::from_raw(img.width(), img.height(), data)
}

/// White balance applied directly on CFA samples, each site using the gain of its color.
pub fn apply_wb_bayer(
    raw: &Image<BayerRaw>,
    gains: &WbGains,
    pattern: BayerPattern,
    inverse: bool,
) -> Image<BayerRaw> {
    let w = raw.width();
    let data = raw
        .data()
        .iter()
        .enumerate()
        .map(|(i, &v)| gains.apply(pattern.channel_at(i % w, i / w), v, inverse))
        .collect();
    Image::from_raw(w, raw.height(), data)
}

/// Camera RGB -> linear sRGB: each pixel left-multiplied by the matrix.
pub fn color_correct(img: &Image<CameraRgb>, ccm: &Ccm) -> Image<LinearSrgb> {
    Image::from_raw(img.width(), img.height(), transform(img.data(), &ccm.forward))
}

/// Linear sRGB -> camera RGB through the inverse matrix.
pub fn inverse_color_correct(img: &Image<LinearSrgb>, ccm: &Ccm) -> Image<CameraRgb> {
    Image::from_raw(img.width(), img.height(), transform(img.data(), &ccm.inverse))
}

/// Camera model: white balance, demosaicing, color correction, CRF.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IspConfig {
    pub wb_gains: WbGains,
    pub ccm: Ccm,
    pub crf: Crf,
    pub bayer_pattern: BayerPattern,
}

impl IspConfig {
    /// Unit gains, identity matrix, the given CRF and RGGB.
    pub fn identity_with(crf: Crf) -> Self {
        Self {
            crf,
            ..Self::default()
        }
    }
}

/// Linear sRGB -> Bayer RAW by undoing every ISP step except the CRF.
/// Nothing is clipped.
pub fn inverse_isp(img: &Image<LinearSrgb>, isp: &IspConfig) -> Result<Image<BayerRaw>> {
    let cam = inverse_color_correct(img, &isp.ccm);
    let cam = apply_wb(&cam, &isp.wb_gains, true);
    mosaic(&cam, isp.bayer_pattern)
}

/// Bayer RAW -> sRGB. The only clip is after color correction, before the CRF.
pub fn forward_isp(raw: &Image<BayerRaw>, isp: &IspConfig) -> Result<Image<Srgb>> {
    let balanced = apply_wb_bayer(raw, &isp.wb_gains, isp.bayer_pattern, false);
    let cam = demosaic_bilinear(&balanced, isp.bayer_pattern)?;
    let lin = color_correct(&cam, &isp.ccm);
    Ok(linear_to_srgb(&lin, &isp.crf))
}
