//! Four-direction Sobel gradients and the binarized edge map.
//!
//! Each of the four 3x3 masks (horizontal, vertical and the two diagonals)
//! is correlated over the interior of the image; every mask is antisymmetric
//! under 180-degree rotation, so absolute responses are identical whether
//! read as correlation or convolution. Border pixels, where the window
//! would leave the image, carry magnitude 0.

use crate::binarize::{binarize, Polarity};
use crate::error::{Error, Result};
use crate::imaging::{BinaryImage, GrayImage};

/// Directional derivative masks, indexed `[dr + 1][dc + 1]`:
/// horizontal edge, vertical edge, and the two diagonals.
pub const SOBEL_MASKS: [[[i32; 3]; 3]; 4] = [
    [[1, 2, 1], [0, 0, 0], [-1, -2, -1]],
    [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]],
    [[0, 1, 2], [-1, 0, 1], [-2, -1, 0]],
    [[-2, -1, 0], [-1, 0, 1], [0, 1, 2]],
];

/// How the four directional responses merge into one magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SobelCombine {
    /// Maximum of absolute responses (default; keeps thin strokes crisp).
    #[default]
    MaxAbs,
    /// Sum of absolute responses.
    SumAbs,
    /// Euclidean norm of the response vector, rounded to nearest.
    RootSumSquare,
}

/// Per-pixel gradient magnitudes; border pixels are always 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientImage {
    width: u32,
    height: u32,
    magnitudes: Vec<u32>,
}

impl GradientImage {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, row: u32, col: u32) -> u32 {
        debug_assert!(row < self.height && col < self.width);
        self.magnitudes[row as usize * self.width as usize + col as usize]
    }

    pub fn magnitudes(&self) -> &[u32] {
        &self.magnitudes
    }
}

fn check_window(img: &GrayImage) -> Result<()> {
    if img.width() < 3 || img.height() < 3 {
        return Err(Error::ImageTooSmall {
            width: img.width(),
            height: img.height(),
            min: 3,
        });
    }
    Ok(())
}

/// Responses of all four masks at one pixel; zero on the border.
pub fn sobel_responses(img: &GrayImage, row: u32, col: u32) -> [i32; 4] {
    if row == 0 || col == 0 || row + 1 >= img.height() || col + 1 >= img.width() {
        return [0; 4];
    }
    let mut out = [0i32; 4];
    for (m, resp) in SOBEL_MASKS.iter().zip(out.iter_mut()) {
        let mut acc = 0i32;
        for dr in 0..3u32 {
            for dc in 0..3u32 {
                let v = img.get(row + dr - 1, col + dc - 1) as i32;
                acc += m[dr as usize][dc as usize] * v;
            }
        }
        *resp = acc;
    }
    out
}

fn combine(responses: [i32; 4], rule: SobelCombine) -> u32 {
    match rule {
        SobelCombine::MaxAbs => responses.iter().map(|r| r.unsigned_abs()).max().unwrap(),
        SobelCombine::SumAbs => responses.iter().map(|r| r.unsigned_abs()).sum(),
        SobelCombine::RootSumSquare => {
            let sq: f64 = responses.iter().map(|&r| (r as f64) * (r as f64)).sum();
            sq.sqrt().round() as u32
        }
    }
}

/// Gradient magnitudes under a chosen combination rule.
pub fn sobel_gradient_with(img: &GrayImage, rule: SobelCombine) -> Result<GradientImage> {
    check_window(img)?;
    let width = img.width();
    let height = img.height();
    let w = width as usize;
    let px = img.intensities();
    let mut magnitudes = vec![0u32; w * height as usize];
    // Unrolled masks over a neighborhood read once per pixel; this is
    // the hot loop of every pipeline run. Equality with the mask-loop
    // form in `sobel_responses` is pinned by tests.
    for row in 1..height as usize - 1 {
        for col in 1..w - 1 {
            let i = row * w + col;
            let nw = px[i - w - 1] as i32;
            let n = px[i - w] as i32;
            let ne = px[i - w + 1] as i32;
            let we = px[i - 1] as i32;
            let ea = px[i + 1] as i32;
            let sw = px[i + w - 1] as i32;
            let s = px[i + w] as i32;
            let se = px[i + w + 1] as i32;
            let responses = [
                nw + 2 * n + ne - sw - 2 * s - se,
                ne + 2 * ea + se - nw - 2 * we - sw,
                n + 2 * ne + ea - we - 2 * sw - s,
                ea + s + 2 * se - 2 * nw - n - we,
            ];
            magnitudes[i] = combine(responses, rule);
        }
    }
    Ok(GradientImage {
        width,
        height,
        magnitudes,
    })
}

/// Gradient magnitudes with the default max-of-absolute-responses rule.
pub fn sobel_gradient(img: &GrayImage) -> Result<GradientImage> {
    sobel_gradient_with(img, SobelCombine::MaxAbs)
}

/// Binarized edge map: magnitudes are scaled to [0,255], thresholded, and
/// high-gradient pixels become foreground. A flat image has no edges and
/// comes back all background.
pub fn edge_map(img: &GrayImage) -> Result<BinaryImage> {
    let grad = sobel_gradient(img)?;
    let max = grad.magnitudes().iter().copied().max().unwrap_or(0);
    if max == 0 {
        return BinaryImage::blank(grad.width(), grad.height());
    }
    let scaled = grad
        .magnitudes()
        .iter()
        .map(|&m| ((m as u64 * 255 + max as u64 / 2) / max as u64) as u8)
        .collect();
    let gray = GrayImage::from_intensities(grad.width(), grad.height(), scaled)?;
    binarize(&gray, Polarity::LightOnDark)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_gray(rng: &mut ChaCha8Rng, width: u32, height: u32, max: u8) -> GrayImage {
        let data = (0..width as usize * height as usize)
            .map(|_| rng.gen_range(0..=max))
            .collect();
        GrayImage::from_intensities(width, height, data).unwrap()
    }

    fn transpose(img: &GrayImage) -> GrayImage {
        let mut out = GrayImage::filled(img.height(), img.width(), 0).unwrap();
        for r in 0..img.height() {
            for c in 0..img.width() {
                out.set(c, r, img.get(r, c));
            }
        }
        out
    }

    #[test]
    fn uniform_image_has_zero_gradient() {
        let img = GrayImage::filled(7, 5, 77).unwrap();
        let grad = sobel_gradient(&img).unwrap();
        assert!(grad.magnitudes().iter().all(|&m| m == 0));
    }

    #[test]
    fn unrolled_gradient_matches_per_pixel_responses() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let (w, h) = (rng.gen_range(3..14), rng.gen_range(3..14));
            let img = random_gray(&mut rng, w, h, 255);
            for rule in [
                SobelCombine::MaxAbs,
                SobelCombine::SumAbs,
                SobelCombine::RootSumSquare,
            ] {
                let grad = sobel_gradient_with(&img, rule).unwrap();
                for r in 0..img.height() {
                    for c in 0..img.width() {
                        assert_eq!(
                            grad.get(r, c),
                            combine(sobel_responses(&img, r, c), rule),
                            "({r},{c}) under {rule:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn vertical_step_edge_peaks_at_1020() {
        let mut img = GrayImage::filled(8, 8, 0).unwrap();
        for r in 0..8 {
            for c in 4..8 {
                img.set(r, c, 255);
            }
        }
        let grad = sobel_gradient(&img).unwrap();
        for r in 1..7 {
            assert_eq!(grad.get(r, 3), 1020);
            assert_eq!(grad.get(r, 4), 1020);
            assert_eq!(grad.get(r, 2), 0);
            assert_eq!(grad.get(r, 5), 0);
        }
    }

    #[test]
    fn responses_match_direct_quadruple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let img = random_gray(&mut rng, 8, 8, 255);
            let grad = sobel_gradient(&img).unwrap();
            for row in 1..7u32 {
                for col in 1..7u32 {
                    let mut expected = [0i32; 4];
                    for (k, e) in expected.iter_mut().enumerate() {
                        for dr in -1i64..=1 {
                            for dc in -1i64..=1 {
                                let v = img.get((row as i64 + dr) as u32, (col as i64 + dc) as u32);
                                *e +=
                                    SOBEL_MASKS[k][(dr + 1) as usize][(dc + 1) as usize] * v as i32;
                            }
                        }
                    }
                    assert_eq!(sobel_responses(&img, row, col), expected);
                    let max_abs = expected.iter().map(|r| r.unsigned_abs()).max().unwrap();
                    assert_eq!(grad.get(row, col), max_abs);
                }
            }
        }
    }

    #[test]
    fn border_magnitudes_are_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let img = random_gray(&mut rng, 6, 4, 255);
        let grad = sobel_gradient(&img).unwrap();
        for c in 0..6 {
            assert_eq!(grad.get(0, c), 0);
            assert_eq!(grad.get(3, c), 0);
        }
        for r in 0..4 {
            assert_eq!(grad.get(r, 0), 0);
            assert_eq!(grad.get(r, 5), 0);
        }
    }

    #[test]
    fn magnitude_is_transpose_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let img = random_gray(&mut rng, 9, 6, 255);
        let grad = sobel_gradient(&img).unwrap();
        let grad_t = sobel_gradient(&transpose(&img)).unwrap();
        for r in 0..img.height() {
            for c in 0..img.width() {
                assert_eq!(grad.get(r, c), grad_t.get(c, r));
            }
        }
    }

    #[test]
    fn constant_brightness_shift_leaves_magnitudes_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let img = random_gray(&mut rng, 8, 8, 200);
        let shifted =
            GrayImage::from_intensities(8, 8, img.intensities().iter().map(|&v| v + 30).collect())
                .unwrap();
        assert_eq!(
            sobel_gradient(&img).unwrap().magnitudes(),
            sobel_gradient(&shifted).unwrap().magnitudes()
        );
    }

    #[test]
    fn undersized_image_rejected() {
        let img = GrayImage::filled(2, 5, 0).unwrap();
        assert!(matches!(
            sobel_gradient(&img),
            Err(Error::ImageTooSmall { .. })
        ));
    }

    #[test]
    fn combine_rules_agree_on_single_direction() {
        // A pure vertical step excites only the vertical mask, so max and
        // root-sum-square coincide while sum adds the diagonal responses.
        let r = [0, 1020, 0, 0];
        assert_eq!(combine(r, SobelCombine::MaxAbs), 1020);
        assert_eq!(combine(r, SobelCombine::SumAbs), 1020);
        assert_eq!(combine(r, SobelCombine::RootSumSquare), 1020);
        let mixed = [300, -400, 0, 0];
        assert_eq!(combine(mixed, SobelCombine::MaxAbs), 400);
        assert_eq!(combine(mixed, SobelCombine::SumAbs), 700);
        assert_eq!(combine(mixed, SobelCombine::RootSumSquare), 500);
    }

    #[test]
    fn edge_map_of_uniform_image_is_empty() {
        let img = GrayImage::filled(10, 10, 128).unwrap();
        let edges = edge_map(&img).unwrap();
        assert_eq!(edges.foreground_count(), 0);
    }

    #[test]
    fn edge_map_of_rectangle_is_a_boundary_ring() {
        // Black rectangle rows 4..=9, cols 3..=11 on a white 16x16 field.
        let mut img = GrayImage::filled(16, 16, 255).unwrap();
        for r in 4..=9 {
            for c in 3..=11 {
                img.set(r, c, 0);
            }
        }
        let edges = edge_map(&img).unwrap();
        assert!(edges.foreground_count() > 0);
        // Mid-edge pixels just inside and outside the boundary must fire.
        assert!(edges.get(4, 7), "top edge missing");
        assert!(edges.get(3, 7), "outer top edge missing");
        assert!(edges.get(9, 7), "bottom edge missing");
        assert!(edges.get(6, 3) && edges.get(6, 11), "side edges missing");
        // Pixels far from the boundary, inside or out, stay background.
        for coord in edges.foreground() {
            let (r, c) = (coord.row as i64, coord.col as i64);
            let dr = (4 - r).max(r - 9).max(0);
            let dc = (3 - c).max(c - 11).max(0);
            let outside = dr.max(dc);
            let inside = (r - 4).min(9 - r).min((c - 3).min(11 - c)).max(0);
            assert!(
                outside <= 1 && inside <= 1,
                "edge pixel ({r},{c}) far from rectangle boundary"
            );
        }
    }
}
