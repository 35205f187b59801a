//! Global Otsu thresholding of a gray image into foreground/background.
//!
//! The threshold search is carried out in exact integer arithmetic so the
//! argmax (and its smallest-t tie-break) is bit-stable across platforms:
//! between-class variance comparisons reduce to comparing products of
//! integers, done here with a 256-bit widening multiply.

use crate::error::{Error, Result};
use crate::imaging::{BinaryImage, GrayImage};

/// Intensity histogram with 256 bins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram256 {
    counts: [u64; 256],
    total: u64,
}

impl Histogram256 {
    pub fn from_counts(counts: [u64; 256]) -> Histogram256 {
        let total = counts.iter().sum();
        Histogram256 { counts, total }
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Tallies pixel intensities.
pub fn histogram(img: &GrayImage) -> Histogram256 {
    let mut counts = [0u64; 256];
    for &v in img.intensities() {
        counts[v as usize] += 1;
    }
    Histogram256::from_counts(counts)
}

/// Which intensity class counts as foreground.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Polarity {
    /// Dark text on a light background: foreground ⇔ intensity ≤ threshold.
    #[default]
    DarkOnLight,
    /// Light text on a dark background: foreground ⇔ intensity > threshold.
    LightOnDark,
}

/// Threshold maximizing the between-class variance over the split
/// `{v ≤ t}` vs `{v > t}`; ties broken by the smallest t. A histogram
/// with a single occupied level returns that level.
///
/// Comparisons are exact for any histogram totaling below 2^40 samples
/// (a terapixel image), far beyond anything this crate ingests.
pub fn otsu_threshold(hist: &Histogram256) -> Result<u8> {
    if hist.total == 0 {
        return Err(Error::EmptyHistogram);
    }
    assert!(
        hist.total < 1 << 40,
        "histogram total {} too large for exact threshold scoring",
        hist.total
    );
    let total = hist.total as u128;
    let total_weighted: u128 = hist
        .counts
        .iter()
        .enumerate()
        .map(|(v, &c)| v as u128 * c as u128)
        .sum();

    // Between-class variance at split t is proportional to a²/d with
    // a = s0·c1 − s1·c0 and d = c0·c1; candidates are compared by
    // cross-multiplying, which stays exact.
    let mut best: Option<(u8, u128, u128)> = None;
    let mut c0: u128 = 0;
    let mut s0: u128 = 0;
    for t in 0..256usize {
        c0 += hist.counts[t] as u128;
        s0 += t as u128 * hist.counts[t] as u128;
        let c1 = total - c0;
        if c0 == 0 || c1 == 0 {
            continue;
        }
        let s1 = total_weighted - s0;
        let a = (s0 * c1).abs_diff(s1 * c0);
        let d = c0 * c1;
        let improves = match best {
            None => true,
            Some((_, best_a, best_d)) => score_gt(a, d, best_a, best_d),
        };
        if improves {
            best = Some((t as u8, a, d));
        }
    }
    match best {
        Some((t, _, _)) => Ok(t),
        // No valid split: all mass sits at one level; return it.
        None => Ok(hist.counts.iter().position(|&c| c > 0).unwrap() as u8),
    }
}

/// Binarizes with the threshold from [`otsu_threshold`]; `polarity`
/// selects which side of the split is foreground.
pub fn binarize(img: &GrayImage, polarity: Polarity) -> Result<BinaryImage> {
    let t = otsu_threshold(&histogram(img))?;
    let mask = img
        .intensities()
        .iter()
        .map(|&v| match polarity {
            Polarity::DarkOnLight => v <= t,
            Polarity::LightOnDark => v > t,
        })
        .collect();
    BinaryImage::from_mask(img.width(), img.height(), mask)
}

/// True iff a1²/d1 > a2²/d2, i.e. a1²·d2 > a2²·d1, computed exactly.
fn score_gt(a1: u128, d1: u128, a2: u128, d2: u128) -> bool {
    mul_u256_u128(mul_wide(a1, a1), d2) > mul_u256_u128(mul_wide(a2, a2), d1)
}

/// 256-bit unsigned value; derived ordering is lexicographic on (hi, lo),
/// which matches numeric order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct U256 {
    hi: u128,
    lo: u128,
}

fn mul_wide(a: u128, b: u128) -> U256 {
    const MASK: u128 = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & MASK);
    let (b1, b0) = (b >> 64, b & MASK);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    U256 {
        hi: p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64),
        lo: (p00 & MASK) | (mid << 64),
    }
}

fn mul_u256_u128(x: U256, m: u128) -> U256 {
    let low = mul_wide(x.lo, m);
    let hi =
        x.hi.checked_mul(m)
            .and_then(|v| v.checked_add(low.hi))
            .expect("threshold score exceeds 256 bits");
    U256 { hi, lo: low.lo }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent recomputation: scan every t, track the argmax with
    /// u128 cross-multiplication. Exact for bin counts ≤ 255.
    fn exhaustive_otsu(counts: &[u64; 256]) -> u8 {
        let total: u128 = counts.iter().map(|&c| c as u128).sum();
        assert!(total > 0 && counts.iter().all(|&c| c <= 255));
        let sum_all: u128 = counts
            .iter()
            .enumerate()
            .map(|(v, &c)| v as u128 * c as u128)
            .sum();
        let mut best: Option<(u8, u128, u128)> = None;
        for t in 0..256usize {
            let c0: u128 = counts[..=t].iter().map(|&c| c as u128).sum();
            let c1 = total - c0;
            if c0 == 0 || c1 == 0 {
                continue;
            }
            let s0: u128 = counts[..=t]
                .iter()
                .enumerate()
                .map(|(v, &c)| v as u128 * c as u128)
                .sum();
            let s1 = sum_all - s0;
            let a = (s0 * c1).abs_diff(s1 * c0);
            let d = c0 * c1;
            let better = match best {
                None => true,
                Some((_, ba, bd)) => a * a * bd > ba * ba * d,
            };
            if better {
                best = Some((t as u8, a, d));
            }
        }
        match best {
            Some((t, _, _)) => t,
            None => counts.iter().position(|&c| c > 0).unwrap() as u8,
        }
    }

    fn random_histogram(rng: &mut ChaCha8Rng) -> [u64; 256] {
        let mut counts = [0u64; 256];
        let occupied = rng.gen_range(1..=12);
        for _ in 0..occupied {
            let level = rng.gen_range(0..256);
            counts[level] = rng.gen_range(0..=255);
        }
        if counts.iter().all(|&c| c == 0) {
            counts[rng.gen_range(0..256)] = 1;
        }
        counts
    }

    #[test]
    fn matches_exhaustive_scan_on_random_histograms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let counts = random_histogram(&mut rng);
            let hist = Histogram256::from_counts(counts);
            assert_eq!(
                otsu_threshold(&hist).unwrap(),
                exhaustive_otsu(&counts),
                "disagreement on {counts:?}"
            );
        }
    }

    #[test]
    fn equal_masses_at_50_and_200_tie_break_to_smallest() {
        let mut counts = [0u64; 256];
        counts[50] = 40;
        counts[200] = 40;
        assert_eq!(
            otsu_threshold(&Histogram256::from_counts(counts)).unwrap(),
            50
        );
    }

    #[test]
    fn single_level_returns_that_level() {
        let mut counts = [0u64; 256];
        counts[7] = 123;
        assert_eq!(
            otsu_threshold(&Histogram256::from_counts(counts)).unwrap(),
            7
        );
    }

    #[test]
    fn empty_histogram_is_an_error() {
        let hist = Histogram256::from_counts([0; 256]);
        assert!(matches!(otsu_threshold(&hist), Err(Error::EmptyHistogram)));
    }

    #[test]
    fn bimodal_threshold_separates_modes() {
        let mut counts = [0u64; 256];
        counts[10] = 100;
        counts[240] = 100;
        let t = otsu_threshold(&Histogram256::from_counts(counts)).unwrap();
        assert!((10..240).contains(&t), "t = {t} does not separate 10/240");
        assert_eq!(t, exhaustive_otsu(&counts));
    }

    #[test]
    fn shifting_intensities_shifts_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..200 {
            let mut counts = [0u64; 256];
            for _ in 0..rng.gen_range(2..8) {
                // Keep levels below 200 so shifting by up to 55 cannot clip.
                counts[rng.gen_range(0..200)] = rng.gen_range(1..=255);
            }
            let k = rng.gen_range(1..=55usize);
            let mut shifted = [0u64; 256];
            for (v, &c) in counts.iter().enumerate() {
                if c > 0 {
                    shifted[v + k] = c;
                }
            }
            let t = otsu_threshold(&Histogram256::from_counts(counts)).unwrap();
            let ts = otsu_threshold(&Histogram256::from_counts(shifted)).unwrap();
            assert_eq!(ts as usize, t as usize + k);
        }
    }

    #[test]
    fn histogram_tallies_correctly() {
        let img = GrayImage::from_intensities(3, 1, vec![0, 128, 255]).unwrap();
        let h = histogram(&img);
        assert_eq!(h.counts()[0], 1);
        assert_eq!(h.counts()[128], 1);
        assert_eq!(h.counts()[255], 1);
        assert_eq!(h.total(), 3);
    }

    #[test]
    fn binarize_marks_dark_pixels_foreground() {
        let mut data = vec![240u8; 16];
        data[3] = 10;
        data[9] = 10;
        let img = GrayImage::from_intensities(4, 4, data).unwrap();
        let bin = binarize(&img, Polarity::DarkOnLight).unwrap();
        assert_eq!(bin.foreground_count(), 2);
        assert!(bin.get(0, 3) && bin.get(2, 1));

        let inverted = binarize(&img, Polarity::LightOnDark).unwrap();
        assert_eq!(inverted.foreground_count(), 14);
        assert!(!inverted.get(0, 3));
    }

    #[test]
    fn uniform_image_is_all_foreground_under_dark_rule() {
        let img = GrayImage::filled(3, 3, 90).unwrap();
        let bin = binarize(&img, Polarity::DarkOnLight).unwrap();
        assert_eq!(bin.foreground_count(), 9);
    }

    #[test]
    fn checkerboard_splits_on_dark_cells() {
        let data: Vec<u8> = (0..16)
            .map(|i| if (i / 4 + i % 4) % 2 == 0 { 0 } else { 255 })
            .collect();
        let img = GrayImage::from_intensities(4, 4, data).unwrap();
        let bin = binarize(&img, Polarity::DarkOnLight).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(bin.get(r, c), (r + c) % 2 == 0);
            }
        }
    }
}
