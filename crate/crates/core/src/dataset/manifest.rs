//! Dataset manifests.
//!
//! ```toml
//! [[scene]]
//! id = "scene_000/exp_00"
//! dir = "scene_000/exp_00"     # relative to the manifest
//! split = "train"
//!
//! [[scene]]
//! id = "gopro/GOPR0372_07_00/000047"
//! dir = "gopro/GOPR0372_07_00"
//! frames = ["000047.png", "000048.png", "000049.png"]
//! gt_index = 1
//! ```
//!
//! Per-scene keys override the scene directory's own `sequence.toml`; keys
//! absent from both fall back to listing the numbered frames in the directory
//! with the center one as ground truth.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Component, Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::blur::{SequenceManifest, SharpSequence};
use crate::error::{Error, Result};
use crate::io::read_srgb;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    #[default]
    Train,
    Val,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    #[serde(default, rename = "scene")]
    scenes: Vec<SceneRepr>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneRepr {
    id: String,
    dir: PathBuf,
    #[serde(default)]
    split: Split,
    #[serde(default)]
    frames: Vec<PathBuf>,
    gt_index: Option<usize>,
    real_blurred: Option<PathBuf>,
    source_stride: Option<usize>,
}

/// One scene exposure with every path resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneEntry {
    pub id: String,
    pub dir: PathBuf,
    pub split: Split,
    pub frames: Vec<PathBuf>,
    pub gt_index: usize,
    pub real_blurred: Option<PathBuf>,
    pub source_stride: Option<usize>,
    pub exposure_blur: Option<f64>,
    pub exposure_sharp: Option<f64>,
}

impl SceneEntry {
    /// Reads the frames (and reference, if any) into a sequence.
    pub fn load(&self) -> Result<SharpSequence> {
        let frames = self
            .frames
            .iter()
            .map(|p| read_srgb(p))
            .collect::<Result<Vec<_>>>()?;
        let mut seq = SharpSequence::new(frames, self.gt_index)?.with_id(self.id.clone());
        if let Some(stride) = self.source_stride {
            seq = seq.with_source_stride(stride)?;
        }
        if let Some(real) = &self.real_blurred {
            seq = seq.with_real_blurred(read_srgb(real)?)?;
        }
        seq.exposure_blur = self.exposure_blur;
        seq.exposure_sharp = self.exposure_sharp;
        Ok(seq)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetManifest {
    pub scenes: Vec<SceneEntry>,
}

impl DatasetManifest {
    pub fn len(&self) -> usize {
        self.scenes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenes.is_empty()
    }
}

fn check_id(id: &str) -> Result<()> {
    let path = Path::new(id);
    let ok = !id.is_empty()
        && path
            .components()
            .all(|c| matches!(c, Component::Normal(_)));
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "scene id `{id}` must be a relative path without `.` or `..`"
        )))
    }
}

/// Parses and validates a manifest. Missing files are collected across all
/// scenes and reported together.
pub fn parse_manifest(text: &str, root: &Path) -> Result<DatasetManifest> {
    let file: ManifestFile = toml::from_str(text).map_err(|e| Error::Parse {
        path: root.to_path_buf(),
        message: e.to_string(),
    })?;

    let mut seen = BTreeSet::new();
    let mut dups = BTreeSet::new();
    for s in &file.scenes {
        check_id(&s.id)?;
        if !seen.insert(s.id.as_str()) {
            dups.insert(s.id.clone());
        }
    }
    if !dups.is_empty() {
        return Err(Error::DuplicateIds(dups.into_iter().collect()));
    }

    let mut missing = Vec::new();
    let mut scenes = Vec::with_capacity(file.scenes.len());
    for s in file.scenes {
        let dir = root.join(&s.dir);
        if !dir.is_dir() {
            missing.push(dir);
            continue;
        }
        let seq = SequenceManifest::load_dir(&dir)?;
        let frames = if s.frames.is_empty() {
            seq.frame_paths(&dir)?
        } else {
            s.frames.iter().map(|f| dir.join(f)).collect()
        };
        let real_blurred = s.real_blurred.or(seq.real_blurred).map(|p| dir.join(p));
        missing.extend(frames.iter().filter(|p| !p.is_file()).cloned());
        missing.extend(real_blurred.iter().filter(|p| !p.is_file()).cloned());
        let gt_index = s.gt_index.or(seq.gt_index).unwrap_or(frames.len() / 2);
        scenes.push(SceneEntry {
            id: s.id,
            dir,
            split: s.split,
            frames,
            gt_index,
            real_blurred,
            source_stride: s.source_stride.or(seq.source_stride),
            exposure_blur: seq.exposure_blur,
            exposure_sharp: seq.exposure_sharp,
        });
    }
    if !missing.is_empty() {
        return Err(Error::MissingFiles(missing));
    }
    Ok(DatasetManifest { scenes })
}

pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let root = path.parent().unwrap_or(Path::new("."));
    parse_manifest(&text, root).map_err(|e| match e {
        Error::Parse { message, .. } => Error::Parse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}
