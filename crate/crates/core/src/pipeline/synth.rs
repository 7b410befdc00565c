use serde::{Deserialize, Serialize};

use crate::blur::{
    apply_oracle_saturation, apply_saturation, average_frames, expand_sequence, saturation_mask,
    MidpointInterpolator, SaturationMask, SharpSequence,
};
use crate::color::{forward_isp, inverse_isp, linear_to_srgb, srgb_to_linear, IspConfig};
use crate::error::{Error, Result};
use crate::image::{Image, LinearSrgb, Srgb};
use crate::noise::{add_gaussian, add_poisson_gaussian, jitter, NoiseRng, StreamId};
use crate::pipeline::config::{CrfMode, Interpolation, MaskSource, NoiseMode, PipelineConfig, Saturation};
use rand::Rng;

/// Everything needed to re-derive a synthesized image from its inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub scene_id: String,
    pub preset: Option<String>,
    pub seed: u64,
    /// Stream for per-image parameters (alpha, jittered noise levels).
    pub params_stream: StreamId,
    /// Stream for per-sample noise.
    pub noise_stream: StreamId,
    pub frames_averaged: usize,
    pub gt_index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta2: Option<f64>,
    /// 32-bit random words drawn across both streams.
    pub random_words: u64,
    pub config: serde_json::Value,
}

#[derive(Debug, Clone)]
pub struct SynthesisOutput {
    pub blurred: Image<Srgb>,
    pub gt_sharp: Image<Srgb>,
    pub mask: SaturationMask,
    pub provenance: Provenance,
}

/// Parameter and noise streams for a scene.
pub fn scene_streams(scene_id: &str) -> (StreamId, StreamId) {
    let base = StreamId::for_scene(scene_id);
    (base.child(0), base.child(1))
}

fn decode(img: &Image<Srgb>, mode: &CrfMode) -> Result<Image<LinearSrgb>> {
    match mode {
        CrfMode::Linear => Ok(img.clone().retag()),
        CrfMode::Curve(crf) => srgb_to_linear(img, crf),
    }
}

fn encode(img: &Image<LinearSrgb>, mode: &CrfMode) -> Image<Srgb> {
    match mode {
        CrfMode::Linear => img.clipped().retag(),
        CrfMode::Curve(crf) => linear_to_srgb(img, crf),
    }
}

/// Runs the configured blur synthesis on one sharp sequence.
///
/// Stage order: optional frame expansion (sRGB) -> saturation mask (sRGB) ->
/// decode -> average -> saturation -> one of
/// * no noise: encode,
/// * Gaussian: encode, then add sRGB Gaussian noise,
/// * Poisson-Gaussian: inverse ISP, RAW noise, forward ISP.
pub fn synthesize(seq: &SharpSequence, cfg: &PipelineConfig, isp: Option<&IspConfig>) -> Result<SynthesisOutput> {
    cfg.validate()?;
    if cfg.saturation == Saturation::Oracle && seq.real_blurred.is_none() {
        return Err(Error::UnsupportedVariant(format!(
            "oracle saturation needs a real blurred reference for `{}`",
            seq.id
        )));
    }
    let isp = match (&cfg.noise, isp) {
        (NoiseMode::PoissonGaussianIsp(_), None) => {
            return Err(Error::UnsupportedVariant(
                "Poisson-Gaussian noise needs an ISP configuration".into(),
            ))
        }
        (_, isp) => isp,
    };

    let (params_stream, noise_stream) = scene_streams(&seq.id);
    let mut params_rng = NoiseRng::new(cfg.seed, params_stream);
    let mut noise_rng = NoiseRng::new(cfg.seed, noise_stream);

    let expanded = match cfg.interpolation {
        Interpolation::Rounds { rounds } => expand_sequence(seq, rounds, &MidpointInterpolator)?,
        Interpolation::Off | Interpolation::External => seq.clone(),
    };

    let mask = match cfg.mask.source {
        MaskSource::AllFrames => saturation_mask(expanded.frames(), cfg.mask.threshold)?,
        MaskSource::SourceFrames => saturation_mask(expanded.source_frames(), cfg.mask.threshold)?,
    };

    let linear = expanded
        .frames()
        .iter()
        .map(|f| decode(f, &cfg.crf))
        .collect::<Result<Vec<_>>>()?;
    let b_syn = average_frames(&linear)?;
    drop(linear);

    let mut alpha = None;
    let b_sat = match cfg.saturation {
        Saturation::Off => b_syn,
        Saturation::Ours { alpha_lo, alpha_hi } => {
            let a = if alpha_lo == alpha_hi {
                alpha_lo
            } else {
                params_rng.random_range(alpha_lo..alpha_hi)
            };
            alpha = Some(a);
            apply_saturation(&b_syn, &mask, a)?
        }
        Saturation::Oracle => {
            let real = seq.real_blurred.as_ref().expect("checked above");
            let real = decode(real, &cfg.crf)?;
            apply_oracle_saturation(&b_syn, Some(&real), &mask)?
        }
    };

    let (mut sigma, mut beta1, mut beta2) = (None, None, None);
    let blurred = match cfg.noise {
        NoiseMode::Off => encode(&b_sat, &cfg.crf),
        NoiseMode::Gaussian {
            sigma: s,
            jitter_lo,
            jitter_hi,
        } => {
            let s = jitter(s, jitter_lo, jitter_hi, &mut params_rng)?;
            sigma = Some(s);
            add_gaussian(&encode(&b_sat, &cfg.crf), s, &mut noise_rng)?
        }
        NoiseMode::PoissonGaussianIsp(params) => {
            let isp = isp.expect("checked above");
            let b1 = jitter(params.beta1, params.jitter_lo, params.jitter_hi, &mut params_rng)?;
            let b2 = jitter(params.beta2, params.jitter_lo, params.jitter_hi, &mut params_rng)?;
            beta1 = Some(b1);
            beta2 = Some(b2);
            let raw = inverse_isp(&b_sat, isp)?;
            let noisy = add_poisson_gaussian(&raw, b1, b2, &mut noise_rng)?;
            forward_isp(&noisy, isp)?
        }
    };

    let provenance = Provenance {
        scene_id: seq.id.clone(),
        preset: cfg.preset.clone(),
        seed: cfg.seed,
        params_stream,
        noise_stream,
        frames_averaged: expanded.len(),
        gt_index: seq.gt_index(),
        alpha,
        sigma,
        beta1,
        beta2,
        random_words: (params_rng.words_used() + noise_rng.words_used()) as u64,
        config: cfg.to_json_value(),
    };
    Ok(SynthesisOutput {
        blurred,
        gt_sharp: seq.gt_frame().clone(),
        mask,
        provenance,
    })
}
