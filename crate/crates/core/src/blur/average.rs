use crate::error::{Error, Result};
use crate::image::{Image, Stage};

/// Correctly rounded sum of a sequence of floats (Shewchuk's partials).
///
/// The result does not depend on summation order.
#[derive(Debug, Default, Clone)]
pub(crate) struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub(crate) fn clear(&mut self) {
        self.partials.clear();
    }

    pub(crate) fn add(&mut self, mut x: f64) {
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    pub(crate) fn total(&self) -> f64 {
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            let y = p[n - 1];
            n -= 1;
            hi = x + y;
            lo = y - (hi - x);
            if lo != 0.0 {
                break;
            }
        }
        // round-half-even correction when the remaining partials push past a tie
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
        hi
    }
}

/// Per-sample arithmetic mean of equally sized frames.
///
/// Sums are exact before the single division, so the result is independent
/// of frame order, and it is kept inside the per-sample `[min, max]` of the
/// inputs (a constant stack averages to itself exactly).
pub fn average_frames<S: Stage>(frames: &[Image<S>]) -> Result<Image<S>> {
    let first = frames
        .first()
        .ok_or_else(|| Error::Shape("cannot average an empty frame list".into()))?;
    for f in &frames[1..] {
        first.ensure_same_shape(f, "average_frames")?;
    }
    let n = frames.len() as f64;
    let mut acc = ExactSum::default();
    let data = (0..first.data().len())
        .map(|i| {
            acc.clear();
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for f in frames {
                let v = f.data()[i];
                acc.add(v);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            (acc.total() / n).clamp(lo, hi)
        })
        .collect();
    Ok(Image::from_raw(first.width(), first.height(), data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::LinearSrgb;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn flat(v: f64) -> Image<LinearSrgb> {
        Image::filled(3, 2, v)
    }

    #[test]
    fn exact_sum_cancels() {
        let mut s = ExactSum::default();
        for v in [1e100, 1.0, -1e100, 1e-30] {
            s.add(v);
        }
        assert_eq!(s.total(), 1.0 + 1e-30);
        let mut s = ExactSum::default();
        for _ in 0..10 {
            s.add(0.1);
        }
        assert_eq!(s.total(), 1.0);
    }

    #[test]
    fn constant_frames_average_to_constant() {
        for v in [0.0, 0.1, 1.0 / 3.0, 0.999_999_9, 1.7] {
            let frames = vec![flat(v); 65];
            assert_eq!(average_frames(&frames).unwrap(), flat(v));
        }
    }

    #[test]
    fn zero_and_one_average_to_half() {
        assert_eq!(average_frames(&[flat(0.0), flat(1.0)]).unwrap(), flat(0.5));
    }

    #[test]
    fn errors() {
        assert!(average_frames::<LinearSrgb>(&[]).is_err());
        assert!(average_frames(&[flat(0.0), Image::filled(2, 2, 0.0)]).is_err());
    }

    #[test]
    fn matches_double_precision_oracle_on_65_frames() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let frames: Vec<Image<LinearSrgb>> = (0..65)
            .map(|_| Image::from_fn(16, 16, |_, _, _| rng.random::<f64>()))
            .collect();
        let mean = average_frames(&frames).unwrap();
        for i in 0..mean.data().len() {
            let mut acc = 0.0f64;
            for f in &frames {
                acc += f.data()[i];
            }
            assert!((mean.data()[i] - acc / 65.0).abs() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn permutation_invariant_and_bounded(
            values in proptest::collection::vec(proptest::collection::vec(-1.0f64..2.0, 6), 2..12),
            rot in 0usize..12,
        ) {
            let frames: Vec<Image<LinearSrgb>> = values
                .iter()
                .map(|v| Image::new(1, 2, v.clone()).unwrap())
                .collect();
            let mut shuffled = frames.clone();
            shuffled.rotate_left(rot % frames.len());
            shuffled.reverse();
            let a = average_frames(&frames).unwrap();
            prop_assert_eq!(&a, &average_frames(&shuffled).unwrap());
            for i in 0..6 {
                let lo = values.iter().map(|v| v[i]).fold(f64::INFINITY, f64::min);
                let hi = values.iter().map(|v| v[i]).fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(a.data()[i] >= lo && a.data()[i] <= hi);
            }
        }
    }
}
