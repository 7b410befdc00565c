//! Color filter array sampling and bilinear reconstruction.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{BayerRaw, CameraRgb, Image};

pub const RED: usize = 0;
pub const GREEN: usize = 1;
pub const BLUE: usize = 2;

/// 2x2 CFA tile, named by its top-left, top-right, bottom-left, bottom-right sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum BayerPattern {
    #[default]
    RGGB,
    BGGR,
    GRBG,
    GBRG,
}

impl BayerPattern {
    pub const ALL: [BayerPattern; 4] = [Self::RGGB, Self::BGGR, Self::GRBG, Self::GBRG];

    fn tile(self) -> [[usize; 2]; 2] {
        match self {
            Self::RGGB => [[RED, GREEN], [GREEN, BLUE]],
            Self::BGGR => [[BLUE, GREEN], [GREEN, RED]],
            Self::GRBG => [[GREEN, RED], [BLUE, GREEN]],
            Self::GBRG => [[GREEN, BLUE], [RED, GREEN]],
        }
    }

    /// Color channel sampled at site `(x, y)`.
    #[inline]
    pub fn channel_at(self, x: usize, y: usize) -> usize {
        self.tile()[y & 1][x & 1]
    }
}

impl fmt::Display for BayerPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for BayerPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown Bayer pattern `{s}`")))
    }
}

fn ensure_even(width: usize, height: usize) -> Result<()> {
    if !width.is_multiple_of(2) || !height.is_multiple_of(2) {
        return Err(Error::Shape(format!(
            "Bayer images need even dimensions, got {width}x{height}"
        )));
    }
    Ok(())
}

/// Keeps, at every site, the channel the CFA samples there.
pub fn mosaic(img: &Image<CameraRgb>, pattern: BayerPattern) -> Result<Image<BayerRaw>> {
    let (w, h) = img.dimensions();
    ensure_even(w, h)?;
    Ok(Image::from_fn(w, h, |x, y, _| img.get(x, y, pattern.channel_at(x, y))))
}

/// Reflects an out-of-range coordinate back inside `0..n` without changing
/// its parity, so the replacement site carries the same CFA color.
#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let r = if i < 0 {
        -i
    } else if i >= n {
        2 * (n - 1) - i
    } else {
        i
    };
    r as usize
}

#[inline]
fn avg2(a: f64, b: f64) -> f64 {
    (a + b) * 0.5
}

/// Mean of four samples as a balanced pairwise tree; exact when all inputs agree.
#[inline]
fn avg4(a: f64, b: f64, c: f64, d: f64) -> f64 {
    avg2(avg2(a, b), avg2(c, d))
}

/// Bilinear demosaicing.
///
/// Sampled sites are copied through unchanged. Each missing channel is the
/// mean of the nearest samples of that color: the four edge neighbours for
/// green, the horizontal or vertical pair for red/blue at a green site, and
/// the four diagonals for red at blue sites (and vice versa). Neighbours
/// beyond the border are replaced by the nearest in-bounds site of the same
/// color.
pub fn demosaic_bilinear(raw: &Image<BayerRaw>, pattern: BayerPattern) -> Result<Image<CameraRgb>> {
    let (w, h) = raw.dimensions();
    ensure_even(w, h)?;
    let at = |x: isize, y: isize| raw.get(reflect(x, w), reflect(y, h), 0);

    let mut out = Vec::with_capacity(w * h * 3);
    for y in 0..h {
        for x in 0..w {
            let own = pattern.channel_at(x, y);
            let (xi, yi) = (x as isize, y as isize);
            let mut px = [0.0; 3];
            for (c, slot) in px.iter_mut().enumerate() {
                *slot = if c == own {
                    raw.get(x, y, 0)
                } else if c == GREEN {
                    avg4(at(xi - 1, yi), at(xi + 1, yi), at(xi, yi - 1), at(xi, yi + 1))
                } else if own == GREEN {
                    // the row through a green site holds exactly one of red/blue
                    if pattern.channel_at(x ^ 1, y) == c {
                        avg2(at(xi - 1, yi), at(xi + 1, yi))
                    } else {
                        avg2(at(xi, yi - 1), at(xi, yi + 1))
                    }
                } else {
                    avg4(
                        at(xi - 1, yi - 1),
                        at(xi + 1, yi - 1),
                        at(xi - 1, yi + 1),
                        at(xi + 1, yi + 1),
                    )
                };
            }
            out.extend_from_slice(&px);
        }
    }
    Ok(Image::from_raw(w, h, out))
}
