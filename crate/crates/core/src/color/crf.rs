//! Camera response functions and the sRGB <-> linear conversions built on them.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::image::{Image, LinearSrgb, Srgb};

/// Maps scene-linear intensity to encoded values and back.
#[derive(Debug, Clone, PartialEq)]
pub enum Crf {
    /// `encoded = linear^(1/gamma)`.
    Gamma(f64),
    Lut(CrfLut),
}

impl Crf {
    pub fn gamma(gamma: f64) -> Result<Self> {
        if gamma.is_finite() && gamma > 0.0 {
            Ok(Crf::Gamma(gamma))
        } else {
            Err(Error::Config(format!("gamma must be positive, got {gamma}")))
        }
    }

    /// Linear -> encoded. Input must already lie in `[0, 1]`.
    #[inline]
    pub fn encode(&self, linear: f64) -> f64 {
        match self {
            Crf::Gamma(g) => linear.powf(1.0 / g),
            Crf::Lut(lut) => lut.encode(linear),
        }
    }

    /// Encoded -> linear. Input must already lie in `[0, 1]`.
    #[inline]
    pub fn decode(&self, encoded: f64) -> f64 {
        match self {
            Crf::Gamma(g) => encoded.powf(*g),
            Crf::Lut(lut) => lut.decode(encoded),
        }
    }
}

impl Default for Crf {
    fn default() -> Self {
        Crf::Gamma(2.2)
    }
}

/// Piecewise-linear CRF through strictly increasing `(linear, encoded)` knots
/// pinned at `(0, 0)` and `(1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrfLut {
    linear: Vec<f64>,
    encoded: Vec<f64>,
    source: Option<PathBuf>,
}

impl CrfLut {
    pub fn new(knots: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let (linear, encoded): (Vec<f64>, Vec<f64>) = knots.into_iter().unzip();
        if linear.len() < 2 {
            return Err(Error::Config("CRF table needs at least two knots".into()));
        }
        let n = linear.len();
        if linear[0] != 0.0 || encoded[0] != 0.0 || linear[n - 1] != 1.0 || encoded[n - 1] != 1.0 {
            return Err(Error::Config(
                "CRF table must start at (0, 0) and end at (1, 1)".into(),
            ));
        }
        for i in 1..n {
            if !(linear[i] > linear[i - 1] && encoded[i] > encoded[i - 1]) {
                return Err(Error::Config(format!(
                    "CRF table not strictly increasing at knot {i}"
                )));
            }
        }
        Ok(Self {
            linear,
            encoded,
            source: None,
        })
    }

    /// Parses two whitespace-separated columns (`linear encoded`) per line.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut knots = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(format!("line {}: expected 2 columns, got {}", lineno + 1, cols.len()));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| format!("line {}: `{s}`: {e}", lineno + 1))
            };
            knots.push((parse(cols[0])?, parse(cols[1])?));
        }
        CrfLut::new(knots).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lut = Self::parse(&text).map_err(|message| Error::Parse {
            path: path.to_path_buf(),
            message,
        })?;
        lut.source = Some(path.to_path_buf());
        Ok(lut)
    }

    /// File the table was loaded from, if any.
    pub fn source(&self) -> Option<&Path> {
        self.source.as_deref()
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.linear.iter().copied().zip(self.encoded.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.linear.len()
    }

    pub fn is_empty(&self) -> bool {
        self.linear.is_empty()
    }

    pub fn encode(&self, x: f64) -> f64 {
        interp(&self.linear, &self.encoded, x)
    }

    pub fn decode(&self, y: f64) -> f64 {
        interp(&self.encoded, &self.linear, y)
    }
}

fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    // first knot strictly greater than x, kept inside [1, n - 1]
    let hi = xs.partition_point(|&k| k <= x).clamp(1, n - 1);
    let lo = hi - 1;
    let t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    ys[lo] + t * (ys[hi] - ys[lo])
}

/// Decodes CRF-encoded samples into linear space.
pub fn srgb_to_linear(img: &Image<Srgb>, crf: &Crf) -> Result<Image<LinearSrgb>> {
    if let Some(v) = img.data().iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Domain(format!(
            "sRGB sample {v} outside [0, 1] cannot be decoded"
        )));
    }
    Ok(img.map(|v| crf.decode(v)).retag())
}

/// Clips linear samples to `[0, 1]` and encodes them with the CRF.
pub fn linear_to_srgb(img: &Image<LinearSrgb>, crf: &Crf) -> Image<Srgb> {
    img.map(|v| crf.encode(v.clamp(0.0, 1.0))).retag()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one(v: f64) -> Image<Srgb> {
        Image::new(1, 1, vec![v; 3]).unwrap()
    }

    fn lin(v: f64) -> Image<LinearSrgb> {
        Image::new(1, 1, vec![v; 3]).unwrap()
    }

    #[test]
    fn gamma_endpoints_fixed() {
        let crf = Crf::Gamma(2.2);
        assert_eq!(srgb_to_linear(&one(0.0), &crf).unwrap().data()[0], 0.0);
        assert_eq!(srgb_to_linear(&one(1.0), &crf).unwrap().data()[0], 1.0);
    }

    #[test]
    fn gamma_midpoint_matches_high_precision_value() {
        // 0.5^2.2 = 0.21763764082403103... (40-digit evaluation)
        let v = srgb_to_linear(&one(0.5), &Crf::Gamma(2.2)).unwrap().data()[0];
        assert!((v - 0.217_637_640_824_031).abs() < 1e-15);
        assert!((v - 0.217638).abs() < 1e-6);
    }

    #[test]
    fn gamma_inverse_example() {
        let v = linear_to_srgb(&lin(0.217638), &Crf::Gamma(2.2)).data()[0];
        assert!((v - 0.5).abs() < 1e-6, "{v}");
    }

    #[test]
    fn unit_gamma_is_identity() {
        for x in [0.0, 0.1, 0.33, 0.75, 1.0] {
            assert_eq!(linear_to_srgb(&lin(x), &Crf::Gamma(1.0)).data()[0], x);
        }
    }

    #[test]
    fn encoding_clips_first() {
        assert_eq!(linear_to_srgb(&lin(1.3), &Crf::Gamma(2.2)).data()[0], 1.0);
        assert_eq!(linear_to_srgb(&lin(-0.2), &Crf::Gamma(2.2)).data()[0], 0.0);
    }

    #[test]
    fn decoding_rejects_out_of_range() {
        let img = Image::<Srgb>::new(1, 1, vec![0.2, 1.01, 0.3]).unwrap();
        assert!(matches!(
            srgb_to_linear(&img, &Crf::Gamma(2.2)),
            Err(Error::Domain(_))
        ));
        let img = Image::<Srgb>::new(1, 1, vec![-0.01, 0.5, 0.3]).unwrap();
        assert!(srgb_to_linear(&img, &Crf::default()).is_err());
    }

    #[test]
    fn gamma_must_be_positive() {
        assert!(Crf::gamma(0.0).is_err());
        assert!(Crf::gamma(-1.0).is_err());
        assert!(Crf::gamma(f64::NAN).is_err());
        assert!(Crf::gamma(2.2).is_ok());
    }

    #[test]
    fn lut_validation() {
        assert!(CrfLut::new([(0.0, 0.0), (1.0, 1.0)]).is_ok());
        assert!(CrfLut::new([(0.0, 0.1), (1.0, 1.0)]).is_err());
        assert!(CrfLut::new([(0.0, 0.0), (0.9, 1.0)]).is_err());
        assert!(CrfLut::new([(0.0, 0.0), (0.5, 0.5), (0.5, 0.6), (1.0, 1.0)]).is_err());
        assert!(CrfLut::new([(0.0, 0.0), (0.5, 0.7), (0.6, 0.7), (1.0, 1.0)]).is_err());
        assert!(CrfLut::new([(0.0, 0.0)]).is_err());
    }

    #[test]
    fn lut_interpolates_linearly_between_knots() {
        let lut = CrfLut::new([(0.0, 0.0), (0.25, 0.5), (1.0, 1.0)]).unwrap();
        assert_eq!(lut.encode(0.125), 0.25);
        assert_eq!(lut.encode(0.25), 0.5);
        assert!((lut.encode(0.625) - 0.75).abs() < 1e-15);
        assert_eq!(lut.decode(0.25), 0.125);
        assert_eq!(lut.encode(1.0), 1.0);
        assert_eq!(lut.decode(0.0), 0.0);
    }

    #[test]
    fn lut_parse_text() {
        let lut = CrfLut::parse("# linear encoded\n0 0\n0.5 0.73  # mid\n\n1 1\n").unwrap();
        assert_eq!(lut.len(), 3);
        assert!(CrfLut::parse("0 0\n0.5\n1 1").is_err());
        assert!(CrfLut::parse("0 0\nx 0.5\n1 1").is_err());
    }

    fn gamma_lut(knots: usize, gamma: f64) -> CrfLut {
        CrfLut::new((0..knots).map(|i| {
            let x = i as f64 / (knots - 1) as f64;
            (x, x.powf(1.0 / gamma))
        }))
        .unwrap()
    }

    proptest! {
        #[test]
        fn gamma_round_trip(x in 0.0f64..=1.0, g in 0.3f64..4.0) {
            let crf = Crf::Gamma(g);
            prop_assert!((crf.encode(crf.decode(x)) - x).abs() < 1e-6);
            prop_assert!((crf.decode(crf.encode(x)) - x).abs() < 1e-6);
        }

        #[test]
        fn lut_round_trip(x in 0.0f64..=1.0) {
            let crf = Crf::Lut(gamma_lut(33, 2.2));
            prop_assert!((crf.encode(crf.decode(x)) - x).abs() < 1e-6);
            prop_assert!((crf.decode(crf.encode(x)) - x).abs() < 1e-6);
        }

        #[test]
        fn encode_is_monotone(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            for crf in [Crf::Gamma(2.2), Crf::Lut(gamma_lut(17, 2.2))] {
                prop_assert!(crf.encode(lo) <= crf.encode(hi));
                prop_assert!(crf.decode(lo) <= crf.decode(hi));
            }
        }
    }
}
