//! Raster image types, BMP I/O, grayscale conversion and skew-correcting
//! rotation.
//!
//! Coordinate convention used throughout the crate: `x ≡ col`, `y ≡ row`,
//! origin at the top-left corner, `y` increases downward.

mod bmp;
mod median;
mod rotate;
mod skew;

pub use bmp::{decode_bmp, encode_bmp, load_bmp, save_binary_bmp, save_bmp, save_gray_bmp};
pub use median::median3x3;
pub use rotate::{rotate, RotationMap};
pub use skew::{estimate_skew, SkewEstimate};

use crate::error::{Error, Result};

/// A single 8-bit-per-channel RGB pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rgb {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Rgb {
    pub const WHITE: Rgb = Rgb {
        r: 255,
        g: 255,
        b: 255,
    };
    pub const BLACK: Rgb = Rgb { r: 0, g: 0, b: 0 };

    pub fn new(r: u8, g: u8, b: u8) -> Rgb {
        Rgb { r, g, b }
    }
}

/// Position of a pixel: `row` is the y coordinate, `col` the x coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PixelCoord {
    pub row: u32,
    pub col: u32,
}

impl PixelCoord {
    pub fn new(row: u32, col: u32) -> PixelCoord {
        PixelCoord { row, col }
    }
}

fn check_dims(width: u32, height: u32) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidDimensions { width, height });
    }
    // Keep width*height indexable on 32-bit hosts as well.
    if (width as u64) * (height as u64) > usize::MAX as u64 {
        return Err(Error::InvalidDimensions { width, height });
    }
    Ok(())
}

/// 24-bit color image stored as a row-major pixel grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorImage {
    width: u32,
    height: u32,
    pixels: Vec<Rgb>,
}

impl ColorImage {
    /// Creates an image filled with a single color.
    pub fn filled(width: u32, height: u32, fill: Rgb) -> Result<ColorImage> {
        check_dims(width, height)?;
        Ok(ColorImage {
            width,
            height,
            pixels: vec![fill; width as usize * height as usize],
        })
    }

    /// Wraps an existing row-major pixel buffer.
    pub fn from_pixels(width: u32, height: u32, pixels: Vec<Rgb>) -> Result<ColorImage> {
        check_dims(width, height)?;
        let expected = width as usize * height as usize;
        if pixels.len() != expected {
            return Err(Error::PixelCountMismatch {
                expected,
                got: pixels.len(),
            });
        }
        Ok(ColorImage {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, row: u32, col: u32) -> Rgb {
        debug_assert!(row < self.height && col < self.width);
        self.pixels[row as usize * self.width as usize + col as usize]
    }

    pub fn set(&mut self, row: u32, col: u32, value: Rgb) {
        debug_assert!(row < self.height && col < self.width);
        self.pixels[row as usize * self.width as usize + col as usize] = value;
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }
}

/// 8-bit grayscale image stored as a row-major intensity grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    intensities: Vec<u8>,
}

impl GrayImage {
    pub fn filled(width: u32, height: u32, fill: u8) -> Result<GrayImage> {
        check_dims(width, height)?;
        Ok(GrayImage {
            width,
            height,
            intensities: vec![fill; width as usize * height as usize],
        })
    }

    pub fn from_intensities(width: u32, height: u32, intensities: Vec<u8>) -> Result<GrayImage> {
        check_dims(width, height)?;
        let expected = width as usize * height as usize;
        if intensities.len() != expected {
            return Err(Error::PixelCountMismatch {
                expected,
                got: intensities.len(),
            });
        }
        Ok(GrayImage {
            width,
            height,
            intensities,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, row: u32, col: u32) -> u8 {
        debug_assert!(row < self.height && col < self.width);
        self.intensities[row as usize * self.width as usize + col as usize]
    }

    pub fn set(&mut self, row: u32, col: u32, value: u8) {
        debug_assert!(row < self.height && col < self.width);
        self.intensities[row as usize * self.width as usize + col as usize] = value;
    }

    pub fn intensities(&self) -> &[u8] {
        &self.intensities
    }

    /// Replicates the gray channel into an RGB image.
    pub fn to_color(&self) -> ColorImage {
        let pixels = self
            .intensities
            .iter()
            .map(|&v| Rgb::new(v, v, v))
            .collect();
        ColorImage {
            width: self.width,
            height: self.height,
            pixels,
        }
    }
}

/// Binary foreground mask. `true` marks foreground (text or edge pixels).
///
/// When serialized to BMP the foreground is written black (0) and the
/// background white (255).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: u32,
    height: u32,
    mask: Vec<bool>,
}

impl BinaryImage {
    pub fn blank(width: u32, height: u32) -> Result<BinaryImage> {
        check_dims(width, height)?;
        Ok(BinaryImage {
            width,
            height,
            mask: vec![false; width as usize * height as usize],
        })
    }

    pub fn from_mask(width: u32, height: u32, mask: Vec<bool>) -> Result<BinaryImage> {
        check_dims(width, height)?;
        let expected = width as usize * height as usize;
        if mask.len() != expected {
            return Err(Error::PixelCountMismatch {
                expected,
                got: mask.len(),
            });
        }
        Ok(BinaryImage {
            width,
            height,
            mask,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, row: u32, col: u32) -> bool {
        debug_assert!(row < self.height && col < self.width);
        self.mask[row as usize * self.width as usize + col as usize]
    }

    pub fn set(&mut self, row: u32, col: u32, value: bool) {
        debug_assert!(row < self.height && col < self.width);
        self.mask[row as usize * self.width as usize + col as usize] = value;
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Number of foreground pixels.
    pub fn foreground_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Iterates over foreground pixel coordinates in row-major order.
    pub fn foreground(&self) -> impl Iterator<Item = PixelCoord> + '_ {
        let width = self.width;
        self.mask
            .iter()
            .enumerate()
            .filter(|&(_, &m)| m)
            .map(move |(i, _)| PixelCoord::new(i as u32 / width, i as u32 % width))
    }

    /// Renders the mask as a gray image: foreground black, background white.
    pub fn to_gray_rendering(&self) -> GrayImage {
        let intensities = self.mask.iter().map(|&m| if m { 0 } else { 255 }).collect();
        GrayImage {
            width: self.width,
            height: self.height,
            intensities,
        }
    }
}

/// Luminance conversion using the weights 0.59 R + 0.30 G + 0.11 B,
/// rounded half-up.
///
/// Note the red/green weights are swapped relative to the usual ITU
/// luma coefficients; this crate keeps them as-is so results match the
/// rest of the pipeline's tuning.
pub fn to_gray(img: &ColorImage) -> GrayImage {
    let intensities = img
        .pixels
        .iter()
        .map(|p| gray_value(p.r, p.g, p.b))
        .collect();
    GrayImage {
        width: img.width,
        height: img.height,
        intensities,
    }
}

fn gray_value(r: u8, g: u8, b: u8) -> u8 {
    // 0.59 R + 0.30 G + 0.11 B over integers: the weights have two decimal
    // digits, so scale by 100 and round half-up at the midpoint.
    let scaled = 59 * r as u32 + 30 * g as u32 + 11 * b as u32;
    ((scaled + 50) / 100).min(255) as u8
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gray_zero_and_white() {
        let mut img = ColorImage::filled(2, 1, Rgb::BLACK).unwrap();
        img.set(0, 1, Rgb::WHITE);
        let gray = to_gray(&img);
        assert_eq!(gray.get(0, 0), 0);
        assert_eq!(gray.get(0, 1), 255);
    }

    #[test]
    fn gray_pure_red_rounds_half_up() {
        // 0.59 * 255 = 150.45 -> 150
        let img = ColorImage::filled(1, 1, Rgb::new(255, 0, 0)).unwrap();
        assert_eq!(to_gray(&img).get(0, 0), 150);
    }

    #[test]
    fn gray_pure_green_and_blue() {
        // 0.30 * 255 = 76.5 -> 77 (half-up), 0.11 * 255 = 28.05 -> 28
        let img = ColorImage::filled(1, 1, Rgb::new(0, 255, 0)).unwrap();
        assert_eq!(to_gray(&img).get(0, 0), 77);
        let img = ColorImage::filled(1, 1, Rgb::new(0, 0, 255)).unwrap();
        assert_eq!(to_gray(&img).get(0, 0), 28);
    }

    #[test]
    fn zero_dimensions_rejected() {
        assert!(ColorImage::filled(0, 4, Rgb::WHITE).is_err());
        assert!(GrayImage::filled(4, 0, 0).is_err());
        assert!(BinaryImage::blank(0, 0).is_err());
    }

    #[test]
    fn pixel_count_must_match() {
        assert!(GrayImage::from_intensities(2, 2, vec![0; 3]).is_err());
        assert!(BinaryImage::from_mask(2, 2, vec![false; 5]).is_err());
    }

    #[test]
    fn foreground_iteration_is_row_major() {
        let mut b = BinaryImage::blank(3, 2).unwrap();
        b.set(1, 0, true);
        b.set(0, 2, true);
        let fg: Vec<PixelCoord> = b.foreground().collect();
        assert_eq!(fg, vec![PixelCoord::new(0, 2), PixelCoord::new(1, 0)]);
        assert_eq!(b.foreground_count(), 2);
    }

    proptest! {
        // Replicating a gray level into all three channels must convert
        // back to exactly that level: 0.59 + 0.30 + 0.11 = 1.00.
        #[test]
        fn gray_idempotent_on_replicated_channels(v in 0u8..=255) {
            prop_assert_eq!(gray_value(v, v, v), v);
        }
    }
}
