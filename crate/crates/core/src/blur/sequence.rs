//! Sharp frame sequences and temporal up-sampling.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{Image, Srgb, Stage};
use crate::io::{list_frame_files, read_srgb};

/// Sharp frames covering one blurred exposure, in capture order.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpSequence {
    /// Identifies the exposure; also keys the per-scene random streams.
    pub id: String,
    frames: Vec<Image<Srgb>>,
    gt_index: usize,
    /// Distance between captured (non-interpolated) frames.
    source_stride: usize,
    pub exposure_blur: Option<f64>,
    pub exposure_sharp: Option<f64>,
    /// Real blurred capture of the same exposure, needed for oracle saturation.
    pub real_blurred: Option<Image<Srgb>>,
}

impl SharpSequence {
    pub fn new(frames: Vec<Image<Srgb>>, gt_index: usize) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::Shape(format!(
                "a sharp sequence needs at least 2 frames, got {}",
                frames.len()
            )));
        }
        if let Some((i, f)) = frames.iter().enumerate().find(|(_, f)| !f.same_shape(&frames[0])) {
            return Err(Error::Shape(format!(
                "frame {i} is {}x{}, frame 0 is {}x{}",
                f.width(),
                f.height(),
                frames[0].width(),
                frames[0].height()
            )));
        }
        if gt_index >= frames.len() {
            return Err(Error::Config(format!(
                "gt_index {gt_index} out of range for {} frames",
                frames.len()
            )));
        }
        Ok(Self {
            id: String::from("scene"),
            frames,
            gt_index,
            source_stride: 1,
            exposure_blur: None,
            exposure_sharp: None,
            real_blurred: None,
        })
    }

    /// Sequence whose ground truth is the center frame.
    pub fn centered(frames: Vec<Image<Srgb>>) -> Result<Self> {
        let gt = frames.len() / 2;
        Self::new(frames, gt)
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn with_real_blurred(mut self, real: Image<Srgb>) -> Result<Self> {
        self.frames[0].ensure_same_shape(&real, "real blurred reference")?;
        self.real_blurred = Some(real);
        Ok(self)
    }

    pub fn with_source_stride(mut self, stride: usize) -> Result<Self> {
        if stride == 0 || !(self.frames.len() - 1).is_multiple_of(stride) {
            return Err(Error::Config(format!(
                "source stride {stride} does not divide {} frame intervals",
                self.frames.len() - 1
            )));
        }
        self.source_stride = stride;
        Ok(self)
    }

    pub fn frames(&self) -> &[Image<Srgb>] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn gt_index(&self) -> usize {
        self.gt_index
    }

    pub fn gt_frame(&self) -> &Image<Srgb> {
        &self.frames[self.gt_index]
    }

    pub fn source_stride(&self) -> usize {
        self.source_stride
    }

    /// The captured frames, skipping interpolated ones.
    pub fn source_frames(&self) -> impl Iterator<Item = &Image<Srgb>> {
        self.frames.iter().step_by(self.source_stride)
    }

    pub fn dimensions(&self) -> (usize, usize) {
        self.frames[0].dimensions()
    }
}

/// Synthesizes the frame halfway between two frames.
pub trait FrameInterpolator: Sync {
    fn interpolate(&self, a: &Image<Srgb>, b: &Image<Srgb>) -> Result<Image<Srgb>>;
}

/// Per-sample average of the two neighbours.
#[derive(Debug, Clone, Copy, Default)]
pub struct MidpointInterpolator;

impl FrameInterpolator for MidpointInterpolator {
    fn interpolate(&self, a: &Image<Srgb>, b: &Image<Srgb>) -> Result<Image<Srgb>> {
        interpolate_midpoint(a, b)
    }
}

pub fn interpolate_midpoint<S: Stage>(a: &Image<S>, b: &Image<S>) -> Result<Image<S>> {
    a.zip_map(b, "midpoint interpolation", |x, y| (x + y) * 0.5)
}

/// Runs `rounds` doubling passes; each inserts one frame between every
/// adjacent pair, so `n` frames become `2n - 1`. Captured frames keep their
/// samples and land on even positions.
pub fn expand_sequence(
    seq: &SharpSequence,
    rounds: u32,
    interpolator: &dyn FrameInterpolator,
) -> Result<SharpSequence> {
    let mut out = seq.clone();
    for _ in 0..rounds {
        let mut frames = Vec::with_capacity(2 * out.frames.len() - 1);
        for pair in out.frames.windows(2) {
            frames.push(pair[0].clone());
            frames.push(interpolator.interpolate(&pair[0], &pair[1])?);
        }
        frames.push(out.frames[out.frames.len() - 1].clone());
        out.frames = frames;
        out.gt_index *= 2;
        out.source_stride *= 2;
    }
    Ok(out)
}

pub const SEQUENCE_MANIFEST: &str = "sequence.toml";

/// Per-directory sequence description.
///
/// Every field is optional: without `frames` all image files in the directory
/// are used in name order, and `gt_index` defaults to the center frame.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceManifest {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frames: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exposure_blur: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exposure_sharp: Option<f64>,
    /// Spacing of captured frames when the list also holds interpolated ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_stride: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub real_blurred: Option<PathBuf>,
}

impl SequenceManifest {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    /// Reads `dir/sequence.toml`, or returns the all-defaults manifest if absent.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let path = dir.join(SEQUENCE_MANIFEST);
        match std::fs::read_to_string(&path) {
            Ok(text) => Self::parse(&text, &path),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::default()),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    /// Frame paths relative to `dir`, falling back to a directory listing.
    pub fn frame_paths(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        if self.frames.is_empty() {
            list_frame_files(dir)
        } else {
            Ok(self.frames.iter().map(|f| dir.join(f)).collect())
        }
    }

    /// Every file this manifest refers to that does not exist.
    pub fn missing_files(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut paths = self.frame_paths(dir)?;
        paths.extend(self.real_blurred.iter().map(|p| dir.join(p)));
        Ok(paths.into_iter().filter(|p| !p.is_file()).collect())
    }
}

/// Loads externally produced frames (e.g. from a neural interpolator) listed
/// by `manifest`, relative to `dir`.
pub fn load_external_frames(dir: &Path, manifest: &SequenceManifest) -> Result<SharpSequence> {
    let paths = manifest.frame_paths(dir)?;
    let missing = manifest.missing_files(dir)?;
    if !missing.is_empty() {
        return Err(Error::MissingFiles(missing));
    }
    let frames = paths
        .iter()
        .map(|p| read_srgb(p))
        .collect::<Result<Vec<_>>>()?;
    if let Some((i, f)) = frames.iter().enumerate().find(|(_, f)| !f.same_shape(&frames[0])) {
        return Err(Error::Shape(format!(
            "{} is {}x{} but {} is {}x{}",
            paths[i].display(),
            f.width(),
            f.height(),
            paths[0].display(),
            frames[0].width(),
            frames[0].height()
        )));
    }
    let gt = manifest.gt_index.unwrap_or(frames.len() / 2);
    let mut seq = SharpSequence::new(frames, gt)?;
    if let Some(stride) = manifest.source_stride {
        seq = seq.with_source_stride(stride)?;
    }
    if let Some(real) = &manifest.real_blurred {
        seq = seq.with_real_blurred(read_srgb(&dir.join(real))?)?;
    }
    seq.exposure_blur = manifest.exposure_blur;
    seq.exposure_sharp = manifest.exposure_sharp;
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_image;
    use crate::io::BitDepth;

    fn flat(v: f64) -> Image<Srgb> {
        Image::filled(4, 2, v)
    }

    fn ramp_sequence(n: usize) -> SharpSequence {
        let frames = (0..n)
            .map(|i| Image::from_fn(4, 2, |x, y, c| ((i * 7 + x * 3 + y + c) % 11) as f64 / 10.0))
            .collect();
        SharpSequence::centered(frames).unwrap()
    }

    #[test]
    fn sequence_validation() {
        assert!(SharpSequence::new(vec![flat(0.0)], 0).is_err());
        assert!(SharpSequence::new(vec![flat(0.0), flat(1.0)], 2).is_err());
        let odd = Image::<Srgb>::filled(2, 2, 0.0);
        assert!(matches!(
            SharpSequence::new(vec![flat(0.0), odd], 0),
            Err(Error::Shape(_))
        ));
        assert_eq!(ramp_sequence(9).gt_index(), 4);
    }

    #[test]
    fn midpoint_examples() {
        let a = flat(0.3);
        assert_eq!(interpolate_midpoint(&a, &a).unwrap(), a);
        assert_eq!(interpolate_midpoint(&flat(0.0), &flat(1.0)).unwrap(), flat(0.5));
        assert!(interpolate_midpoint(&flat(0.0), &Image::filled(2, 2, 0.0)).is_err());
    }

    #[test]
    fn midpoint_matches_elementwise_mean() {
        let a = Image::<Srgb>::from_fn(5, 3, |x, y, c| ((x * 31 + y * 17 + c * 7) % 13) as f64 / 13.0);
        let b = Image::<Srgb>::from_fn(5, 3, |x, y, c| ((x * 11 + y * 5 + c * 3) % 19) as f64 / 19.0);
        let m = interpolate_midpoint(&a, &b).unwrap();
        for i in 0..a.data().len() {
            assert!((m.data()[i] - (a.data()[i] + b.data()[i]) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn nine_frames_three_rounds_gives_sixty_five() {
        let seq = ramp_sequence(9);
        let out = expand_sequence(&seq, 3, &MidpointInterpolator).unwrap();
        assert_eq!(out.len(), 65);
        assert_eq!(out.gt_index(), 32);
        assert_eq!(out.source_stride(), 8);
        for (i, f) in seq.frames().iter().enumerate() {
            assert_eq!(&out.frames()[8 * i], f);
        }
        assert_eq!(out.gt_frame(), seq.gt_frame());
        assert_eq!(out.source_frames().count(), 9);
    }

    #[test]
    fn zero_rounds_is_identity() {
        let seq = ramp_sequence(5);
        assert_eq!(expand_sequence(&seq, 0, &MidpointInterpolator).unwrap(), seq);
    }

    #[test]
    fn one_round_on_two_frames() {
        let seq = SharpSequence::new(vec![flat(0.2), flat(0.6)], 0).unwrap();
        let out = expand_sequence(&seq, 1, &MidpointInterpolator).unwrap();
        assert_eq!(out.len(), 3);
        assert_eq!(out.frames()[1], interpolate_midpoint(&flat(0.2), &flat(0.6)).unwrap());
    }

    #[test]
    fn length_law_holds_per_round() {
        for n in 2..6 {
            let mut len = n;
            for rounds in 0..4 {
                let out = expand_sequence(&ramp_sequence(n), rounds, &MidpointInterpolator).unwrap();
                assert_eq!(out.len(), len);
                len = 2 * len - 1;
            }
        }
    }

    fn write_frames(dir: &Path, n: usize, size: (usize, usize)) -> Vec<PathBuf> {
        (0..n)
            .map(|i| {
                let name = PathBuf::from(format!("{i:05}.png"));
                let img = Image::<Srgb>::filled(size.0, size.1, i as f64 / n as f64);
                write_image(&img, &dir.join(&name), BitDepth::Eight).unwrap();
                name
            })
            .collect()
    }

    #[test]
    fn external_frames_in_manifest_order() {
        let dir = tempfile::tempdir().unwrap();
        let mut names = write_frames(dir.path(), 65, (4, 2));
        names.reverse();
        let manifest = SequenceManifest {
            frames: names,
            gt_index: Some(10),
            source_stride: Some(8),
            ..Default::default()
        };
        let seq = load_external_frames(dir.path(), &manifest).unwrap();
        assert_eq!(seq.len(), 65);
        assert_eq!(seq.gt_index(), 10);
        assert_eq!(seq.source_frames().count(), 9);
        assert_eq!(seq.frames()[0].data()[0], (64.0f64 / 65.0 * 255.0).round() / 255.0);
    }

    #[test]
    fn external_frames_from_directory_listing() {
        let dir = tempfile::tempdir().unwrap();
        write_frames(dir.path(), 9, (4, 2));
        let seq = load_external_frames(dir.path(), &SequenceManifest::default()).unwrap();
        assert_eq!(seq.len(), 9);
        assert_eq!(seq.gt_index(), 4);
        assert_eq!(seq.frames()[0].data()[0], 0.0);
    }

    #[test]
    fn external_frames_missing_file() {
        let dir = tempfile::tempdir().unwrap();
        let mut names = write_frames(dir.path(), 3, (4, 2));
        names.push("nope.png".into());
        names.push("also_nope.png".into());
        let manifest = SequenceManifest {
            frames: names,
            ..Default::default()
        };
        match load_external_frames(dir.path(), &manifest) {
            Err(Error::MissingFiles(missing)) => assert_eq!(missing.len(), 2),
            other => panic!("expected missing-file error, got {other:?}"),
        }
    }

    #[test]
    fn external_frames_dimension_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let mut names = write_frames(dir.path(), 2, (4, 2));
        let odd = Image::<Srgb>::filled(6, 2, 0.5);
        write_image(&odd, &dir.path().join("odd.png"), BitDepth::Eight).unwrap();
        names.push("odd.png".into());
        let manifest = SequenceManifest {
            frames: names,
            ..Default::default()
        };
        assert!(matches!(
            load_external_frames(dir.path(), &manifest),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn external_frames_unreadable() {
        let dir = tempfile::tempdir().unwrap();
        let mut names = write_frames(dir.path(), 2, (4, 2));
        std::fs::write(dir.path().join("junk.png"), b"not a png").unwrap();
        names.push("junk.png".into());
        let manifest = SequenceManifest {
            frames: names,
            ..Default::default()
        };
        assert!(matches!(
            load_external_frames(dir.path(), &manifest),
            Err(Error::Decode { .. })
        ));
    }
}
