//! Stage-tagged floating point images.
//!
//! Samples are stored interleaved (`(y * width + x) * channels + c`) as `f64`.
//! The color-space stage is part of the type, so handing a camera-RGB image to
//! an operation that expects linear sRGB does not compile.

use std::fmt;
use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Runtime name of a color-space stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageKind {
    Srgb,
    LinearSrgb,
    CameraRgb,
    BayerRaw,
}

impl fmt::Display for StageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StageKind::Srgb => "sRGB",
            StageKind::LinearSrgb => "linear sRGB",
            StageKind::CameraRgb => "camera RGB",
            StageKind::BayerRaw => "Bayer RAW",
        };
        f.write_str(s)
    }
}

/// Type-level color-space stage.
pub trait Stage: Copy + fmt::Debug + PartialEq + Send + Sync + 'static {
    const KIND: StageKind;
    const CHANNELS: usize;
}

macro_rules! stage {
    ($(#[$m:meta])* $name:ident, $kind:ident, $channels:expr) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
        pub struct $name;

        impl Stage for $name {
            const KIND: StageKind = StageKind::$kind;
            const CHANNELS: usize = $channels;
        }
    };
}

stage!(
    /// Display-referred, CRF-encoded RGB.
    Srgb, Srgb, 3
);
stage!(
    /// Scene-linear RGB with sRGB primaries.
    LinearSrgb, LinearSrgb, 3
);
stage!(
    /// Linear, white-balanced camera RGB (before color correction).
    CameraRgb, CameraRgb, 3
);
stage!(
    /// Single-channel color filter array samples.
    BayerRaw, BayerRaw, 1
);

#[derive(Clone, PartialEq)]
pub struct Image<S: Stage> {
    width: usize,
    height: usize,
    data: Vec<f64>,
    _stage: PhantomData<S>,
}

impl<S: Stage> fmt::Debug for Image<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Image")
            .field("stage", &S::KIND)
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl<S: Stage> Image<S> {
    /// Wraps interleaved samples, checking length and finiteness.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        let expected = width * height * S::CHANNELS;
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "{} image {}x{} needs {} samples, got {}",
                S::KIND,
                width,
                height,
                expected,
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite sample {} at index {i}",
                data[i]
            )));
        }
        Ok(Self::from_raw(width, height, data))
    }

    pub(crate) fn from_raw(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height * S::CHANNELS);
        Self {
            width,
            height,
            data,
            _stage: PhantomData,
        }
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(value.is_finite());
        Self::from_raw(width, height, vec![value; width * height * S::CHANNELS])
    }

    /// Builds an image by evaluating `f(x, y, channel)` at every sample.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height * S::CHANNELS);
        for y in 0..height {
            for x in 0..width {
                for c in 0..S::CHANNELS {
                    let v = f(x, y, c);
                    assert!(v.is_finite(), "non-finite sample at ({x}, {y}, {c})");
                    data.push(v);
                }
            }
        }
        Self::from_raw(width, height, data)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn channels(&self) -> usize {
        S::CHANNELS
    }

    #[inline]
    pub fn stage(&self) -> StageKind {
        S::KIND
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * S::CHANNELS + c]
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn same_shape<T: Stage>(&self, other: &Image<T>) -> bool {
        self.width == other.width && self.height == other.height && S::CHANNELS == T::CHANNELS
    }

    pub(crate) fn ensure_same_shape<T: Stage>(&self, other: &Image<T>, what: &str) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{what}: {}x{}x{} vs {}x{}x{}",
                self.width,
                self.height,
                S::CHANNELS,
                other.width,
                other.height,
                T::CHANNELS
            )))
        }
    }

    pub(crate) fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.width, self.height, self.data.iter().map(|&v| f(v)).collect())
    }

    pub(crate) fn zip_map(&self, other: &Self, what: &str, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.ensure_same_shape(other, what)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self::from_raw(self.width, self.height, data))
    }

    /// Reinterprets the samples under another stage with the same channel count.
    pub(crate) fn retag<T: Stage>(self) -> Image<T> {
        assert_eq!(S::CHANNELS, T::CHANNELS);
        Image::from_raw(self.width, self.height, self.data)
    }

    /// Clamps every sample into `[0, 1]`.
    pub fn clipped(&self) -> Self {
        self.map(|v| v.clamp(0.0, 1.0))
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}
