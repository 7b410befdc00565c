//! Saturated-pixel masks and the two ways of putting saturation back into a
//! synthetic blur: additive re-saturation and oracle replacement.

use crate::error::{Error, Result};
use crate::image::{Image, LinearSrgb, Stage};

/// Fraction of frames in which each sample was saturated, stored as exact
/// counts over the frame total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaturationMask {
    width: usize,
    height: usize,
    channels: usize,
    counts: Vec<u32>,
    frames: u32,
}

impl SaturationMask {
    /// All-zero mask over `frames` frames.
    pub fn empty(width: usize, height: usize, channels: usize, frames: u32) -> Self {
        assert!(frames > 0);
        Self {
            width,
            height,
            channels,
            counts: vec![0; width * height * channels],
            frames,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Number of frames the mask averages over.
    pub fn frame_count(&self) -> u32 {
        self.frames
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    #[inline]
    pub fn value(&self, i: usize) -> f64 {
        self.counts[i] as f64 / self.frames as f64
    }

    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.value((y * self.width + x) * self.channels + c)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.counts.len()).map(|i| self.value(i))
    }

    /// Sites with a non-zero value.
    pub fn nonzero(&self) -> usize {
        self.counts.iter().filter(|&&k| k > 0).count()
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&k| k == 0)
    }

    fn ensure_matches<S: Stage>(&self, img: &Image<S>, what: &str) -> Result<()> {
        if img.width() == self.width && img.height() == self.height && img.channels() == self.channels {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{what}: image {}x{}x{} vs mask {}x{}x{}",
                img.width(),
                img.height(),
                img.channels(),
                self.width,
                self.height,
                self.channels
            )))
        }
    }
}

/// Marks samples at or above `threshold` in each frame and averages the marks.
pub fn saturation_mask<'a, S: Stage>(
    frames: impl IntoIterator<Item = &'a Image<S>>,
    threshold: f64,
) -> Result<SaturationMask> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Config(format!(
            "saturation threshold must lie in (0, 1], got {threshold}"
        )));
    }
    let mut frames = frames.into_iter();
    let first = frames
        .next()
        .ok_or_else(|| Error::Shape("saturation mask needs at least one frame".into()))?;
    let mut mask = SaturationMask::empty(first.width(), first.height(), first.channels(), 1);
    let accumulate = |mask: &mut SaturationMask, f: &Image<S>| {
        for (k, &v) in mask.counts.iter_mut().zip(f.data()) {
            *k += u32::from(v >= threshold);
        }
    };
    accumulate(&mut mask, first);
    for f in frames {
        mask.ensure_matches(f, "saturation mask")?;
        accumulate(&mut mask, f);
        mask.frames += 1;
    }
    Ok(mask)
}

/// `clip(b_syn + alpha * mask)` into `[0, 1]`.
pub fn apply_saturation(b_syn: &Image<LinearSrgb>, mask: &SaturationMask, alpha: f64) -> Result<Image<LinearSrgb>> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::Config(format!("alpha must be non-negative, got {alpha}")));
    }
    mask.ensure_matches(b_syn, "apply_saturation")?;
    let data = b_syn
        .data()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v + alpha * mask.value(i)).clamp(0.0, 1.0))
        .collect();
    Ok(Image::from_raw(b_syn.width(), b_syn.height(), data))
}

/// Takes `b_real` wherever the mask is non-zero and `b_syn` elsewhere.
pub fn apply_oracle_saturation<S: Stage>(
    b_syn: &Image<S>,
    b_real: Option<&Image<S>>,
    mask: &SaturationMask,
) -> Result<Image<S>> {
    let b_real = b_real.ok_or_else(|| {
        Error::UnsupportedVariant("oracle saturation needs a real blurred reference".into())
    })?;
    mask.ensure_matches(b_syn, "oracle saturation")?;
    b_syn.ensure_same_shape(b_real, "oracle saturation")?;
    let data = b_syn
        .data()
        .iter()
        .zip(b_real.data())
        .zip(mask.counts())
        .map(|((&s, &r), &k)| if k > 0 { r } else { s })
        .collect();
    Ok(Image::from_raw(b_syn.width(), b_syn.height(), data))
}
