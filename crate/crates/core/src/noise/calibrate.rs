//! Noise parameter estimation from flat-field and dark-frame captures.
//!
//! `beta1` is the slope of a least-squares line through (patch mean, patch
//! variance) pairs taken from flats at several exposure levels. Patches are
//! split by CFA phase so that differently colored sites are never mixed.
//! `beta2` is the pooled standard deviation of dark frames around their
//! per-site mean.

use crate::error::{Error, Result};
use crate::image::{BayerRaw, Image};

pub const DEFAULT_PATCH: usize = 32;

/// Ordinary least-squares line `y = slope * x + intercept`.
pub fn fit_line(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return Err(Error::Calibration("need at least two points to fit a line".into()));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::Calibration("all points share one abscissa".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

fn mean_var(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let ss: f64 = samples.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, if samples.len() > 1 { ss / (n - 1.0) } else { 0.0 })
}

/// (mean, unbiased variance) of every `patch x patch` tile and CFA phase.
pub fn patch_statistics(frame: &Image<BayerRaw>, patch: usize) -> Vec<(f64, f64)> {
    let (w, h) = frame.dimensions();
    // even-sized, no larger than the frame
    let size = patch.min(w).min(h).max(2) & !1;
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(size * size / 4);
    for py in 0..h / size {
        for px in 0..w / size {
            for phase in 0..4 {
                let (dx, dy) = (phase & 1, phase >> 1);
                buf.clear();
                for y in (py * size + dy..(py + 1) * size).step_by(2) {
                    for x in (px * size + dx..(px + 1) * size).step_by(2) {
                        buf.push(frame.get(x, y, 0));
                    }
                }
                if buf.len() > 1 {
                    out.push(mean_var(&buf));
                }
            }
        }
    }
    out
}

pub fn calibrate_beta1(flat_fields: &[Image<BayerRaw>]) -> Result<f64> {
    calibrate_beta1_with(flat_fields, DEFAULT_PATCH)
}

/// Estimates the system gain from flat fields spanning at least two distinct
/// exposure levels.
pub fn calibrate_beta1_with(flat_fields: &[Image<BayerRaw>], patch: usize) -> Result<f64> {
    if flat_fields.len() < 2 {
        return Err(Error::Calibration(format!(
            "need flat fields at two or more levels, got {} frame(s)",
            flat_fields.len()
        )));
    }
    let means: Vec<f64> = flat_fields.iter().map(|f| mean_var(f.data()).0).collect();
    let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 1e-9 {
        return Err(Error::Calibration(format!(
            "flat fields all sit at one level ({lo:.6})"
        )));
    }
    let points: Vec<(f64, f64)> = flat_fields
        .iter()
        .flat_map(|f| patch_statistics(f, patch))
        .collect();
    Ok(fit_line(&points)?.0)
}

/// Estimates read-noise standard deviation from dark frames.
///
/// With two or more frames, deviations are taken from each site's mean over
/// the frames (which removes fixed-pattern offsets); a single frame falls back
/// to deviations from its per-CFA-phase mean.
pub fn calibrate_beta2(dark_frames: &[Image<BayerRaw>]) -> Result<f64> {
    let first = dark_frames
        .first()
        .ok_or_else(|| Error::Calibration("no dark frames".into()))?;
    for f in &dark_frames[1..] {
        first.ensure_same_shape(f, "dark frames")?;
    }
    let sites = first.data().len();
    let n = dark_frames.len();
    let (ss, dof) = if n >= 2 {
        let mut ss = 0.0;
        for i in 0..sites {
            let mean = dark_frames.iter().map(|f| f.data()[i]).sum::<f64>() / n as f64;
            ss += dark_frames
                .iter()
                .map(|f| (f.data()[i] - mean) * (f.data()[i] - mean))
                .sum::<f64>();
        }
        (ss, (sites * (n - 1)) as f64)
    } else {
        let (w, h) = first.dimensions();
        let mut ss = 0.0;
        let mut dof = 0.0;
        for phase in 0..4 {
            let samples: Vec<f64> = (phase >> 1..h)
                .step_by(2)
                .flat_map(|y| ((phase & 1)..w).step_by(2).map(move |x| (x, y)))
                .map(|(x, y)| first.get(x, y, 0))
                .collect();
            if samples.len() > 1 {
                let (_, var) = mean_var(&samples);
                ss += var * (samples.len() - 1) as f64;
                dof += (samples.len() - 1) as f64;
            }
        }
        (ss, dof)
    };
    if dof <= 0.0 {
        return Err(Error::Calibration("dark frames have too few samples".into()));
    }
    Ok((ss / dof).sqrt())
}
