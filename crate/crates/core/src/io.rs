//! Lossless PNG reading and writing for stage-tagged images and masks.
//!
//! Samples are quantized as `round(v * (2^d - 1))` and read back as
//! `q / (2^d - 1)`. Writes go to a temporary sibling first and are renamed
//! into place, so a final name never points at a partial file.

use std::io::Cursor;
use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageBuffer, ImageFormat, Luma, Rgb};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::blur::SaturationMask;
use crate::error::{Error, Result};
use crate::image::{BayerRaw, Image, Srgb, Stage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum BitDepth {
    Eight,
    #[default]
    Sixteen,
}

impl BitDepth {
    pub fn max_value(self) -> f64 {
        match self {
            BitDepth::Eight => 255.0,
            BitDepth::Sixteen => 65535.0,
        }
    }

    pub fn quantize(self, v: f64) -> u16 {
        (v * self.max_value()).round() as u16
    }
}

impl TryFrom<u8> for BitDepth {
    type Error = Error;

    fn try_from(bits: u8) -> Result<Self> {
        match bits {
            8 => Ok(BitDepth::Eight),
            16 => Ok(BitDepth::Sixteen),
            other => Err(Error::Config(format!("bit depth must be 8 or 16, got {other}"))),
        }
    }
}

impl From<BitDepth> for u8 {
    fn from(d: BitDepth) -> u8 {
        match d {
            BitDepth::Eight => 8,
            BitDepth::Sixteen => 16,
        }
    }
}

/// Hex SHA-256 of a byte buffer.
pub fn checksum(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn encode_png(
    width: usize,
    height: usize,
    channels: usize,
    samples: &[f64],
    depth: BitDepth,
) -> Result<Vec<u8>> {
    if let Some(v) = samples.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Domain(format!("cannot store sample {v} outside [0, 1]")));
    }
    let (w, h) = (width as u32, height as u32);
    let dynamic = match (channels, depth) {
        (3, BitDepth::Eight) => DynamicImage::ImageRgb8(
            ImageBuffer::<Rgb<u8>, _>::from_raw(w, h, samples.iter().map(|&v| depth.quantize(v) as u8).collect())
                .expect("buffer sized from image"),
        ),
        (3, BitDepth::Sixteen) => DynamicImage::ImageRgb16(
            ImageBuffer::<Rgb<u16>, _>::from_raw(w, h, samples.iter().map(|&v| depth.quantize(v)).collect())
                .expect("buffer sized from image"),
        ),
        (1, BitDepth::Eight) => DynamicImage::ImageLuma8(
            ImageBuffer::<Luma<u8>, _>::from_raw(w, h, samples.iter().map(|&v| depth.quantize(v) as u8).collect())
                .expect("buffer sized from image"),
        ),
        (1, BitDepth::Sixteen) => DynamicImage::ImageLuma16(
            ImageBuffer::<Luma<u16>, _>::from_raw(w, h, samples.iter().map(|&v| depth.quantize(v)).collect())
                .expect("buffer sized from image"),
        ),
        (c, _) => return Err(Error::Shape(format!("cannot encode {c}-channel image"))),
    };
    let mut bytes = Vec::new();
    dynamic
        .write_to(&mut Cursor::new(&mut bytes), ImageFormat::Png)
        .map_err(|e| Error::Domain(format!("PNG encoding failed: {e}")))?;
    Ok(bytes)
}

/// Writes `bytes` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("{} has no file name", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

/// Stores an image as PNG and returns the SHA-256 of the written bytes.
pub fn write_image<S: Stage>(img: &Image<S>, path: &Path, depth: BitDepth) -> Result<String> {
    let bytes = encode_png(img.width(), img.height(), img.channels(), img.data(), depth)?;
    write_atomic(path, &bytes)?;
    Ok(checksum(&bytes))
}

/// Stores a saturation mask as an RGB PNG of its fractional values.
pub fn write_mask(mask: &SaturationMask, path: &Path, depth: BitDepth) -> Result<String> {
    let values: Vec<f64> = mask.values().collect();
    let bytes = encode_png(mask.width(), mask.height(), mask.channels(), &values, depth)?;
    write_atomic(path, &bytes)?;
    Ok(checksum(&bytes))
}

fn open(path: &Path) -> Result<DynamicImage> {
    if !path.is_file() {
        return Err(Error::MissingFiles(vec![path.to_path_buf()]));
    }
    image::open(path).map_err(|e| Error::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn is_sixteen_bit(img: &DynamicImage) -> bool {
    img.color().bytes_per_pixel() / img.color().channel_count() >= 2
}

/// Reads an 8- or 16-bit image as sRGB samples in `[0, 1]`.
pub fn read_srgb(path: &Path) -> Result<Image<Srgb>> {
    let img = open(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data = if is_sixteen_bit(&img) {
        img.to_rgb16().into_raw().into_iter().map(|q| q as f64 / 65535.0).collect()
    } else {
        img.to_rgb8().into_raw().into_iter().map(|q| q as f64 / 255.0).collect()
    };
    Image::new(w, h, data)
}

/// Reads a single-channel 8- or 16-bit image as Bayer RAW samples in `[0, 1]`.
pub fn read_raw(path: &Path) -> Result<Image<BayerRaw>> {
    let img = open(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data = if is_sixteen_bit(&img) {
        img.to_luma16().into_raw().into_iter().map(|q| q as f64 / 65535.0).collect()
    } else {
        img.to_luma8().into_raw().into_iter().map(|q| q as f64 / 255.0).collect()
    };
    Image::new(w, h, data)
}

const IMAGE_EXTENSIONS: [&str; 4] = ["png", "tif", "tiff", "jpg"];

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.iter().any(|x| x.eq_ignore_ascii_case(e)))
}

/// Image files in `dir` whose stem is a number (`00000.png`, `00001.png`, ...),
/// ordered by that number.
pub fn list_frame_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut frames = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if !path.is_file() || !is_image(&path) {
            continue;
        }
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        if let Ok(n) = stem.parse::<u64>() {
            frames.push((n, path));
        }
    }
    frames.sort();
    Ok(frames.into_iter().map(|(_, p)| p).collect())
}

/// All image files in `dir`, sorted by name.
pub fn list_image_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && is_image(&path) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quantization_examples() {
        assert_eq!(BitDepth::Eight.quantize(1.0), 255);
        assert_eq!(BitDepth::Sixteen.quantize(0.5), 32768);
        assert_eq!(BitDepth::Sixteen.quantize(0.0), 0);
        assert!(BitDepth::try_from(12).is_err());
    }

    #[test]
    fn stored_values_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let img = Image::<Srgb>::new(1, 1, vec![1.0, 0.5, 0.0]).unwrap();
        let p8 = dir.path().join("a.png");
        write_image(&img, &p8, BitDepth::Eight).unwrap();
        let raw8 = image::open(&p8).unwrap().to_rgb8();
        assert_eq!(raw8.get_pixel(0, 0).0, [255, 128, 0]);
        let p16 = dir.path().join("b.png");
        write_image(&img, &p16, BitDepth::Sixteen).unwrap();
        let raw16 = image::open(&p16).unwrap().to_rgb16();
        assert_eq!(raw16.get_pixel(0, 0).0, [65535, 32768, 0]);
    }

    #[test]
    fn checksum_covers_file_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.png");
        let sum = write_image(&Image::<Srgb>::filled(3, 2, 0.25), &path, BitDepth::Sixteen).unwrap();
        assert_eq!(sum, checksum(&std::fs::read(&path).unwrap()));
        assert!(!dir.path().join(".c.png.tmp").exists());
    }

    #[test]
    fn out_of_range_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let img = Image::<Srgb>::filled(1, 1, 1.2);
        assert!(write_image(&img, &dir.path().join("x.png"), BitDepth::Eight).is_err());
        assert!(!dir.path().join("x.png").exists());
    }

    #[test]
    fn raw_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("raw.png");
        let raw = Image::<BayerRaw>::from_fn(4, 2, |x, y, _| (x + 4 * y) as f64 / 7.0);
        write_image(&raw, &path, BitDepth::Sixteen).unwrap();
        let back = read_raw(&path).unwrap();
        for (a, b) in back.data().iter().zip(raw.data()) {
            assert_eq!(*a, BitDepth::Sixteen.quantize(*b) as f64 / 65535.0);
        }
    }

    #[test]
    fn frame_listing_uses_numeric_stems() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["00010.png", "00002.png", "blurred.png", "00001.png", "notes.txt"] {
            std::fs::write(dir.path().join(name), b"").unwrap();
        }
        let names: Vec<String> = list_frame_files(dir.path())
            .unwrap()
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(names, ["00001.png", "00002.png", "00010.png"]);
    }

    #[test]
    fn missing_and_corrupt_files() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            read_srgb(&dir.path().join("none.png")),
            Err(Error::MissingFiles(_))
        ));
        std::fs::write(dir.path().join("bad.png"), b"garbage").unwrap();
        assert!(matches!(
            read_srgb(&dir.path().join("bad.png")),
            Err(Error::Decode { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn write_read_returns_quantized_values(
            data in proptest::collection::vec(0.0f64..=1.0, 3 * 6),
            sixteen in any::<bool>(),
        ) {
            let depth = if sixteen { BitDepth::Sixteen } else { BitDepth::Eight };
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("p.png");
            let img = Image::<Srgb>::new(3, 2, data).unwrap();
            write_image(&img, &path, depth).unwrap();
            let back = read_srgb(&path).unwrap();
            for (a, b) in back.data().iter().zip(img.data()) {
                prop_assert_eq!(*a, depth.quantize(*b) as f64 / depth.max_value());
            }
        }
    }
}
