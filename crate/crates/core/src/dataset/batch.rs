use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::color::IspConfig;
use crate::dataset::manifest::{DatasetManifest, SceneEntry, Split};
use crate::error::{Error, Result};
use crate::io::{write_atomic, write_image, write_mask, BitDepth};
use crate::pipeline::{synthesize, PipelineConfig};

pub const BLURRED_FILE: &str = "blurred.png";
pub const GT_FILE: &str = "gt.png";
pub const MASK_FILE: &str = "mask.png";
pub const PROVENANCE_FILE: &str = "provenance.json";
pub const INDEX_FILE: &str = "index.json";

/// Files written for one scene exposure. Paths are relative to the output root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub scene_id: String,
    pub split: Split,
    pub blurred: PathBuf,
    pub gt: PathBuf,
    pub mask: PathBuf,
    pub provenance: PathBuf,
    /// SHA-256 of the blurred PNG bytes.
    pub checksum: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneFailure {
    pub scene_id: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchReport {
    pub records: Vec<OutputRecord>,
    pub failures: Vec<SceneFailure>,
}

impl BatchReport {
    pub fn is_success(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchOptions {
    pub workers: usize,
    pub bit_depth: BitDepth,
}

impl Default for BatchOptions {
    fn default() -> Self {
        Self {
            workers: 1,
            bit_depth: BitDepth::Sixteen,
        }
    }
}

fn ensure_writable(out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let probe = out_dir.join(".write_probe");
    std::fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    std::fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
}

fn process_scene(
    scene: &SceneEntry,
    cfg: &PipelineConfig,
    isp: Option<&IspConfig>,
    out_dir: &Path,
    depth: BitDepth,
) -> Result<OutputRecord> {
    let seq = scene.load()?;
    let out = synthesize(&seq, cfg, isp)?;

    let rel = PathBuf::from(scene.split.to_string()).join(&scene.id);
    let final_dir = out_dir.join(&rel);
    let parent = final_dir.parent().expect("scene dir has a parent");
    std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    let leaf = final_dir.file_name().expect("scene id is non-empty").to_string_lossy();
    let staging = parent.join(format!(".{leaf}.partial"));
    if staging.exists() {
        std::fs::remove_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
    }
    std::fs::create_dir(&staging).map_err(|e| Error::io(&staging, e))?;

    let checksum = write_image(&out.blurred, &staging.join(BLURRED_FILE), depth)?;
    write_image(&out.gt_sharp, &staging.join(GT_FILE), depth)?;
    write_mask(&out.mask, &staging.join(MASK_FILE), BitDepth::Sixteen)?;
    let mut json = serde_json::to_vec_pretty(&out.provenance).expect("provenance serializes");
    json.push(b'\n');
    write_atomic(&staging.join(PROVENANCE_FILE), &json)?;

    if final_dir.exists() {
        std::fs::remove_dir_all(&final_dir).map_err(|e| Error::io(&final_dir, e))?;
    }
    std::fs::rename(&staging, &final_dir).map_err(|e| Error::io(&final_dir, e))?;

    Ok(OutputRecord {
        scene_id: scene.id.clone(),
        split: scene.split,
        blurred: rel.join(BLURRED_FILE),
        gt: rel.join(GT_FILE),
        mask: rel.join(MASK_FILE),
        provenance: rel.join(PROVENANCE_FILE),
        checksum,
    })
}

/// Synthesizes every scene in `manifest` into `out_dir`.
///
/// Scenes run in parallel on `options.workers` threads; each scene's random
/// streams depend only on the seed and its id, so the output tree is the same
/// for any worker count. A scene that fails is reported and skipped. An
/// output directory that cannot be written fails the whole batch before any
/// synthesis starts.
pub fn run_batch(
    manifest: &DatasetManifest,
    cfg: &PipelineConfig,
    isp: Option<&IspConfig>,
    out_dir: &Path,
    options: BatchOptions,
) -> Result<BatchReport> {
    if options.workers == 0 {
        return Err(Error::Config("worker count must be at least 1".into()));
    }
    cfg.validate()?;
    ensure_writable(out_dir)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<OutputRecord>> = pool.install(|| {
        manifest
            .scenes
            .par_iter()
            .map(|scene| process_scene(scene, cfg, isp, out_dir, options.bit_depth))
            .collect()
    });

    let mut report = BatchReport::default();
    for (scene, result) in manifest.scenes.iter().zip(results) {
        match result {
            Ok(record) => {
                info!("{}: wrote {}", scene.id, record.blurred.display());
                report.records.push(record);
            }
            Err(e) => {
                warn!("{}: {e}", scene.id);
                report.failures.push(SceneFailure {
                    scene_id: scene.id.clone(),
                    message: e.to_string(),
                });
            }
        }
    }
    let mut index = serde_json::to_vec_pretty(&report).expect("report serializes");
    index.push(b'\n');
    write_atomic(&out_dir.join(INDEX_FILE), &index)?;
    Ok(report)
}
