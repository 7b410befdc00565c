use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{BayerRaw, Image, Srgb};

/// Calibrated sensor noise levels plus the jitter range applied per image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseParams {
    /// System gain: signal units per photo-electron.
    pub beta1: f64,
    /// Read-noise standard deviation in signal units.
    pub beta2: f64,
    /// Gaussian standard deviation for noise added directly in sRGB.
    pub sigma_srgb: f64,
    pub jitter_lo: f64,
    pub jitter_hi: f64,
}

impl NoiseParams {
    pub const BETA1: f64 = 0.0001;
    pub const BETA2: f64 = 0.0009;
    pub const SIGMA_SRGB: f64 = 0.0112;

    pub fn validate(&self) -> Result<()> {
        let ok = self.beta1.is_finite()
            && self.beta1 > 0.0
            && self.beta2.is_finite()
            && self.beta2 >= 0.0
            && self.sigma_srgb.is_finite()
            && self.sigma_srgb >= 0.0;
        if !ok {
            return Err(Error::Config(format!("invalid noise parameters {self:?}")));
        }
        check_jitter(self.jitter_lo, self.jitter_hi)
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            beta1: Self::BETA1,
            beta2: Self::BETA2,
            sigma_srgb: Self::SIGMA_SRGB,
            jitter_lo: 0.5,
            jitter_hi: 1.5,
        }
    }
}

pub(crate) fn check_jitter(lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi {
        Ok(())
    } else {
        Err(Error::Config(format!("jitter bounds must satisfy 0 < lo <= hi, got ({lo}, {hi})")))
    }
}

/// `value * u` with `u ~ U(lo, hi)`. Draws nothing when `lo == hi`.
pub fn jitter<R: Rng + ?Sized>(value: f64, lo: f64, hi: f64, rng: &mut R) -> Result<f64> {
    check_jitter(lo, hi)?;
    if lo == hi {
        return Ok(value * lo);
    }
    Ok(value * rng.random_range(lo..hi))
}

/// Poisson sampler: exact below `gaussian_cutoff`, moment-matched normal
/// (rounded, floored at zero) above it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonSampler {
    pub gaussian_cutoff: f64,
}

impl Default for PoissonSampler {
    fn default() -> Self {
        Self { gaussian_cutoff: 1e4 }
    }
}

impl PoissonSampler {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, lambda: f64, rng: &mut R) -> f64 {
        if lambda <= 0.0 {
            0.0
        } else if lambda > self.gaussian_cutoff {
            let z: f64 = StandardNormal.sample(rng);
            (lambda + lambda.sqrt() * z).round().max(0.0)
        } else {
            Poisson::new(lambda)
                .expect("positive finite rate")
                .sample(rng)
        }
    }
}

/// Adds shot and read noise to a RAW image:
/// `beta1 * Poisson(max(b, 0) / beta1) + N(0, beta2)` per sample, no clipping.
pub fn add_poisson_gaussian<R: Rng + ?Sized>(
    raw: &Image<BayerRaw>,
    beta1: f64,
    beta2: f64,
    rng: &mut R,
) -> Result<Image<BayerRaw>> {
    add_poisson_gaussian_with(raw, beta1, beta2, PoissonSampler::default(), rng)
}

pub fn add_poisson_gaussian_with<R: Rng + ?Sized>(
    raw: &Image<BayerRaw>,
    beta1: f64,
    beta2: f64,
    sampler: PoissonSampler,
    rng: &mut R,
) -> Result<Image<BayerRaw>> {
    if !(beta1.is_finite() && beta1 > 0.0) {
        return Err(Error::Config(format!("beta1 must be positive, got {beta1}")));
    }
    if !(beta2.is_finite() && beta2 >= 0.0) {
        return Err(Error::Config(format!("beta2 must be non-negative, got {beta2}")));
    }
    let read = Normal::new(0.0, beta2).expect("validated above");
    let data = raw
        .data()
        .iter()
        .map(|&b| {
            let shot = beta1 * sampler.sample(b.max(0.0) / beta1, rng);
            if beta2 > 0.0 {
                shot + read.sample(rng)
            } else {
                shot
            }
        })
        .collect();
    Ok(Image::from_raw(raw.width(), raw.height(), data))
}

/// `clip(b + N(0, sigma))`; with `sigma == 0` this is a plain clip.
pub fn add_gaussian<R: Rng + ?Sized>(img: &Image<Srgb>, sigma: f64, rng: &mut R) -> Result<Image<Srgb>> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::Config(format!("sigma must be non-negative, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(img.clipped());
    }
    let noise = Normal::new(0.0, sigma).expect("validated above");
    let data = img
        .data()
        .iter()
        .map(|&v| (v + noise.sample(rng)).clamp(0.0, 1.0))
        .collect();
    Ok(Image::from_raw(img.width(), img.height(), data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::rng::{NoiseRng, StreamId};

    fn rng(stream: u64) -> NoiseRng {
        NoiseRng::new(2024, StreamId(stream))
    }

    fn moments(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn degenerate_jitter_is_identity() {
        let mut r = rng(0);
        assert_eq!(jitter(0.37, 1.0, 1.0, &mut r).unwrap(), 0.37);
        assert_eq!(r.words_used(), 0);
    }

    #[test]
    fn jitter_stays_in_range() {
        let mut r = rng(1);
        for _ in 0..10_000 {
            let v = jitter(0.0001, 0.5, 1.5, &mut r).unwrap();
            assert!((0.00005..=0.00015).contains(&v));
        }
    }

    #[test]
    fn jitter_rejects_bad_bounds() {
        let mut r = rng(2);
        assert!(jitter(1.0, 0.0, 1.0, &mut r).is_err());
        assert!(jitter(1.0, 1.5, 0.5, &mut r).is_err());
        assert!(jitter(1.0, -1.0, 0.5, &mut r).is_err());
    }

    #[test]
    fn jitter_mean_monte_carlo() {
        let mut r = rng(3);
        let n = 1_000_000;
        let sum: f64 = (0..n).map(|_| jitter(2.0, 0.5, 1.5, &mut r).unwrap()).sum();
        let mean = sum / n as f64;
        assert!((mean - 2.0).abs() / 2.0 < 0.005, "{mean}");
    }

    #[test]
    fn zero_signal_without_read_noise_stays_zero() {
        let raw = Image::<BayerRaw>::filled(8, 8, 0.0);
        let out = add_poisson_gaussian(&raw, 1e-4, 0.0, &mut rng(4)).unwrap();
        assert!(out.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn negative_samples_use_zero_rate_but_keep_read_noise() {
        let raw = Image::<BayerRaw>::filled(64, 64, -0.05);
        let out = add_poisson_gaussian(&raw, 1e-4, 0.0, &mut rng(5)).unwrap();
        assert!(out.data().iter().all(|&v| v == 0.0));
        let out = add_poisson_gaussian(&raw, 1e-4, 0.001, &mut rng(5)).unwrap();
        let (mean, var) = moments(out.data());
        assert!(mean.abs() < 1e-4);
        assert!((var.sqrt() - 0.001).abs() < 1e-4);
    }

    #[test]
    fn poisson_gaussian_moments() {
        // E = b, Var = beta1 * b + beta2^2 = 1.81e-6 at b = 0.01
        let raw = Image::<BayerRaw>::filled(1000, 1000, 0.01);
        let out = add_poisson_gaussian(&raw, 1e-4, 9e-4, &mut rng(6)).unwrap();
        let (mean, var) = moments(out.data());
        assert!((mean - 0.01).abs() / 0.01 < 0.01, "{mean}");
        assert!((var - 1.81e-6).abs() / 1.81e-6 < 0.02, "{var}");
    }

    #[test]
    fn shot_noise_grows_with_signal() {
        let var_at = |b: f64| {
            let raw = Image::<BayerRaw>::filled(256, 256, b);
            moments(add_poisson_gaussian(&raw, 1e-4, 9e-4, &mut rng(7)).unwrap().data()).1
        };
        assert!(var_at(0.04) > var_at(0.01));
    }

    #[test]
    fn poisson_gaussian_is_deterministic() {
        let raw = Image::<BayerRaw>::from_fn(16, 16, |x, y, _| (x * y) as f64 / 225.0);
        let a = add_poisson_gaussian(&raw, 1e-4, 9e-4, &mut rng(8)).unwrap();
        let b = add_poisson_gaussian(&raw, 1e-4, 9e-4, &mut rng(8)).unwrap();
        assert_eq!(a, b);
        let c = add_poisson_gaussian(&raw, 1e-4, 9e-4, &mut rng(9)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn poisson_gaussian_rejects_bad_gain() {
        let raw = Image::<BayerRaw>::filled(2, 2, 0.1);
        assert!(add_poisson_gaussian(&raw, 0.0, 0.0, &mut rng(0)).is_err());
        assert!(add_poisson_gaussian(&raw, 1e-4, -1.0, &mut rng(0)).is_err());
    }

    #[test]
    fn gaussian_cutoff_switches_sampler() {
        // above the cutoff the normal approximation keeps the Poisson moments
        let sampler = PoissonSampler { gaussian_cutoff: 50.0 };
        let mut r = rng(10);
        let v: Vec<f64> = (0..200_000).map(|_| sampler.sample(400.0, &mut r)).collect();
        let (mean, var) = moments(&v);
        assert!((mean - 400.0).abs() < 0.5);
        assert!((var - 400.0).abs() / 400.0 < 0.02);
        assert!(v.iter().all(|x| x.fract() == 0.0));
    }

    #[test]
    fn gaussian_noise_examples() {
        let img = Image::<Srgb>::new(1, 1, vec![0.2, 1.3, -0.1]).unwrap();
        let mut r = rng(11);
        assert_eq!(add_gaussian(&img, 0.0, &mut r).unwrap(), img.clipped());
        assert_eq!(r.words_used(), 0);
        assert!(add_gaussian(&img, -0.1, &mut r).is_err());

        let mid = Image::<Srgb>::filled(1000, 334, 0.5);
        let (mean, var) = moments(add_gaussian(&mid, 0.0112, &mut r).unwrap().data());
        assert!((mean - 0.5).abs() / 0.5 < 0.005);
        assert!((var.sqrt() - 0.0112).abs() / 0.0112 < 0.02);

        let top = Image::<Srgb>::filled(100, 100, 1.0);
        let out = add_gaussian(&top, 0.0112, &mut r).unwrap();
        assert!(out.data().iter().all(|&v| v <= 1.0));
        assert!(moments(out.data()).0 < 1.0);
    }

    #[test]
    fn params_validation() {
        assert!(NoiseParams::default().validate().is_ok());
        let bad = NoiseParams { beta1: 0.0, ..NoiseParams::default() };
        assert!(bad.validate().is_err());
        let bad = NoiseParams { jitter_lo: 2.0, ..NoiseParams::default() };
        assert!(bad.validate().is_err());
    }
}
