//! Small-angle rotation used for skew correction.
//!
//! Positive angles tilt the content clockwise on screen (the y axis points
//! down). The destination canvas grows to hold the whole rotated frame and
//! uncovered pixels are filled with white background.

use super::{check_dims, GrayImage};
use crate::error::{Error, Result};

/// Largest rotation magnitude, in degrees, the deskew path accepts.
pub const MAX_ROTATION_DEG: f64 = 45.0;

const BACKGROUND: u8 = 255;

/// Geometry of a rotation: maps points between the source frame and the
/// grown destination canvas. Useful for carrying ground-truth boxes
/// through the same transform the pixels undergo.
#[derive(Debug, Clone)]
pub struct RotationMap {
    cos: f64,
    sin: f64,
    src_cx: f64,
    src_cy: f64,
    dst_cx: f64,
    dst_cy: f64,
    dest_width: u32,
    dest_height: u32,
}

impl RotationMap {
    /// Builds the map for rotating a `width` x `height` image by
    /// `angle_deg`. Rejects magnitudes above [`MAX_ROTATION_DEG`].
    pub fn new(width: u32, height: u32, angle_deg: f64) -> Result<RotationMap> {
        check_dims(width, height)?;
        if angle_deg.is_nan() || angle_deg.abs() > MAX_ROTATION_DEG {
            return Err(Error::AngleOutOfRange(angle_deg));
        }
        let (sin, cos) = angle_deg.to_radians().sin_cos();
        let w = width as f64;
        let h = height as f64;
        let dest_width = (w * cos.abs() + h * sin.abs()).ceil() as u32;
        let dest_height = (w * sin.abs() + h * cos.abs()).ceil() as u32;
        Ok(RotationMap {
            cos,
            sin,
            src_cx: (w - 1.0) / 2.0,
            src_cy: (h - 1.0) / 2.0,
            dst_cx: (dest_width as f64 - 1.0) / 2.0,
            dst_cy: (dest_height as f64 - 1.0) / 2.0,
            dest_width,
            dest_height,
        })
    }

    pub fn dest_width(&self) -> u32 {
        self.dest_width
    }

    pub fn dest_height(&self) -> u32 {
        self.dest_height
    }

    /// Maps a source-frame point (x = col, y = row) into the destination.
    pub fn forward(&self, x: f64, y: f64) -> (f64, f64) {
        let dx = x - self.src_cx;
        let dy = y - self.src_cy;
        (
            self.cos * dx - self.sin * dy + self.dst_cx,
            self.sin * dx + self.cos * dy + self.dst_cy,
        )
    }

    /// Maps a destination point back into the source frame.
    pub fn inverse(&self, x: f64, y: f64) -> (f64, f64) {
        let dx = x - self.dst_cx;
        let dy = y - self.dst_cy;
        (
            self.cos * dx + self.sin * dy + self.src_cx,
            -self.sin * dx + self.cos * dy + self.src_cy,
        )
    }
}

/// Rotates the image by `angle_deg` degrees around its center, sampling
/// with bilinear interpolation. Rotation by exactly zero returns a
/// bit-identical copy.
pub fn rotate(img: &GrayImage, angle_deg: f64) -> Result<GrayImage> {
    let map = RotationMap::new(img.width(), img.height(), angle_deg)?;
    let mut out = GrayImage::filled(map.dest_width(), map.dest_height(), BACKGROUND)?;
    for row in 0..out.height() {
        for col in 0..out.width() {
            let (sx, sy) = map.inverse(col as f64, row as f64);
            out.set(row, col, sample_bilinear(img, sx, sy));
        }
    }
    Ok(out)
}

fn sample_bilinear(img: &GrayImage, x: f64, y: f64) -> u8 {
    let w = img.width() as f64;
    let h = img.height() as f64;
    if x < -0.5 || y < -0.5 || x > w - 0.5 || y > h - 0.5 {
        return BACKGROUND;
    }
    let x0 = x.floor();
    let y0 = y.floor();
    let at = |xi: f64, yi: f64| -> f64 {
        if xi < 0.0 || yi < 0.0 || xi >= w || yi >= h {
            BACKGROUND as f64
        } else {
            img.get(yi as u32, xi as u32) as f64
        }
    };
    let fx = x - x0;
    let fy = y - y0;
    if fx == 0.0 && fy == 0.0 {
        // Grid-aligned sample: copy the pixel so zero rotation is exact.
        return at(x0, y0) as u8;
    }
    let v = (1.0 - fx) * (1.0 - fy) * at(x0, y0)
        + fx * (1.0 - fy) * at(x0 + 1.0, y0)
        + (1.0 - fx) * fy * at(x0, y0 + 1.0)
        + fx * fy * at(x0 + 1.0, y0 + 1.0);
    v.round().clamp(0.0, 255.0) as u8
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::GrayImage;

    fn patterned(width: u32, height: u32) -> GrayImage {
        let data = (0..width as usize * height as usize)
            .map(|i| (i * 37 % 256) as u8)
            .collect();
        GrayImage::from_intensities(width, height, data).unwrap()
    }

    #[test]
    fn zero_rotation_is_identity() {
        let img = patterned(13, 7);
        assert_eq!(rotate(&img, 0.0).unwrap(), img);
    }

    #[test]
    fn canvas_grows_to_hold_rotated_frame() {
        // 100 * (cos 45 + sin 45) = 141.42..., rounded up.
        let map = RotationMap::new(100, 100, 45.0).unwrap();
        assert_eq!(map.dest_width(), 142);
        assert_eq!(map.dest_height(), 142);
    }

    #[test]
    fn out_of_range_angles_rejected() {
        let img = patterned(4, 4);
        assert!(matches!(rotate(&img, 46.0), Err(Error::AngleOutOfRange(_))));
        assert!(matches!(
            rotate(&img, -50.0),
            Err(Error::AngleOutOfRange(_))
        ));
        assert!(rotate(&img, f64::NAN).is_err());
        assert!(rotate(&img, 45.0).is_ok());
    }

    #[test]
    fn uniform_image_stays_uniform() {
        let img = GrayImage::filled(20, 10, 255).unwrap();
        let rotated = rotate(&img, 17.5).unwrap();
        assert!(rotated.intensities().iter().all(|&v| v == 255));
    }

    #[test]
    fn positive_angle_tilts_clockwise_on_screen() {
        // Horizontal dark line; after +3 degrees its right end must sit
        // lower (larger row) than its left end.
        let mut img = GrayImage::filled(101, 21, 255).unwrap();
        for col in 0..101 {
            img.set(10, col, 0);
        }
        let rotated = rotate(&img, 3.0).unwrap();
        let dark: Vec<(u32, u32)> = (0..rotated.height())
            .flat_map(|r| (0..rotated.width()).map(move |c| (r, c)))
            .filter(|&(r, c)| rotated.get(r, c) < 128)
            .collect();
        let leftmost = dark.iter().copied().min_by_key(|&(_, c)| c).unwrap();
        let rightmost = dark.iter().copied().max_by_key(|&(_, c)| c).unwrap();
        assert!(
            rightmost.0 > leftmost.0 + 2,
            "expected clockwise tilt, got left {leftmost:?} right {rightmost:?}"
        );
    }

    #[test]
    fn forward_map_tracks_rotated_content() {
        // A lone dark dot must land where the forward map says it lands.
        let mut img = GrayImage::filled(11, 11, 255).unwrap();
        img.set(2, 8, 0);
        let map = RotationMap::new(11, 11, 30.0).unwrap();
        let (xd, yd) = map.forward(8.0, 2.0);
        let rotated = rotate(&img, 30.0).unwrap();
        let (mut best, mut best_v) = ((0u32, 0u32), 255u8);
        for r in 0..rotated.height() {
            for c in 0..rotated.width() {
                if rotated.get(r, c) < best_v {
                    best = (r, c);
                    best_v = rotated.get(r, c);
                }
            }
        }
        assert!(best_v < 200, "dot vanished");
        let dr = best.0 as f64 - yd;
        let dc = best.1 as f64 - xd;
        assert!(
            (dr * dr + dc * dc).sqrt() < 1.5,
            "darkest pixel {best:?} far from forward map ({xd:.2}, {yd:.2})"
        );
    }

    #[test]
    fn round_trip_keeps_center_block_dark() {
        let mut img = GrayImage::filled(21, 21, 255).unwrap();
        for r in 9..=11 {
            for c in 9..=11 {
                img.set(r, c, 0);
            }
        }
        let back = rotate(&rotate(&img, 45.0).unwrap(), -45.0).unwrap();
        let center = back.get(back.height() / 2, back.width() / 2);
        assert!(center <= 50, "center washed out to {center}");
    }
}
