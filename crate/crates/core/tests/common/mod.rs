#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use blursynth::io::{write_image, BitDepth};
use blursynth::{Image, Srgb};

/// A sharp frame with a bright square sliding across a textured background.
pub fn moving_square(w: usize, h: usize, t: usize, phase: usize) -> Image<Srgb> {
    let side = w / 6;
    let x0 = 4 + 3 * t + phase;
    let y0 = h / 3 + phase;
    Image::from_fn(w, h, |x, y, c| {
        if (x0..x0 + side).contains(&x) && (y0..y0 + side).contains(&y) {
            1.0
        } else {
            let u = (x * 7 + y * 3 + c * 11 + phase * 5) % 97;
            0.1 + 0.6 * u as f64 / 96.0
        }
    })
}

/// Writes `scenes` directories of `frames` PNG frames plus a manifest listing them.
pub fn write_fixture(root: &Path, scenes: usize, frames: usize, size: usize) -> PathBuf {
    let mut manifest = String::new();
    for s in 0..scenes {
        let dir = root.join(format!("scene_{s:03}"));
        std::fs::create_dir_all(&dir).unwrap();
        for t in 0..frames {
            let img = moving_square(size, size, t, s);
            write_image(&img, &dir.join(format!("{t:05}.png")), BitDepth::Eight).unwrap();
        }
        let split = ["train", "val", "test"][s % 3];
        writeln!(manifest, "[[scene]]\nid = \"scene_{s:03}\"\ndir = \"scene_{s:03}\"\nsplit = \"{split}\"\n").unwrap();
    }
    let path = root.join("manifest.toml");
    std::fs::write(&path, manifest).unwrap();
    path
}

/// Relative path -> file bytes for every file under `root`.
pub fn read_tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_path_buf();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}
