//! Dataset ingestion and parallel batch generation.

mod batch;
pub mod manifest;

pub use batch::{
    run_batch, BatchOptions, BatchReport, OutputRecord, SceneFailure, BLURRED_FILE, GT_FILE,
    INDEX_FILE, MASK_FILE, PROVENANCE_FILE,
};
pub use manifest::{load_manifest, parse_manifest, DatasetManifest, SceneEntry, Split};
