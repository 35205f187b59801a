//! 24-bit uncompressed BMP reader and writer.
//!
//! The writer emits a 14-byte file header followed by a 40-byte
//! BITMAPINFOHEADER, bottom-up rows padded to 4-byte boundaries, BGR byte
//! order. The reader accepts both bottom-up and top-down row order but
//! only the 24-bit uncompressed variant.

use std::fs;
use std::path::Path;

use super::{BinaryImage, ColorImage, GrayImage, Rgb};
use crate::error::{Error, Result};

const FILE_HEADER_SIZE: usize = 14;
const INFO_HEADER_SIZE: usize = 40;
const PIXEL_OFFSET: usize = FILE_HEADER_SIZE + INFO_HEADER_SIZE;

fn read_u16(bytes: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([bytes[at], bytes[at + 1]])
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

fn read_i32(bytes: &[u8], at: usize) -> i32 {
    i32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

fn row_size(width: u32) -> usize {
    (width as usize * 3 + 3) & !3
}

/// Loads a 24-bit uncompressed BMP file.
pub fn load_bmp(path: impl AsRef<Path>) -> Result<ColorImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| Error::UnreadableFile {
        path: path.to_path_buf(),
        source,
    })?;
    decode_bmp(&bytes)
}

/// Decodes a 24-bit uncompressed BMP from memory.
pub fn decode_bmp(bytes: &[u8]) -> Result<ColorImage> {
    if bytes.len() < PIXEL_OFFSET {
        return Err(Error::CorruptHeader(format!(
            "file is {} bytes, shorter than the 54-byte header",
            bytes.len()
        )));
    }
    if &bytes[0..2] != b"BM" {
        return Err(Error::CorruptHeader("missing 'BM' magic".into()));
    }
    let info_size = read_u32(bytes, 14);
    if info_size < INFO_HEADER_SIZE as u32 {
        return Err(Error::CorruptHeader(format!(
            "info header is {info_size} bytes, expected at least 40"
        )));
    }
    let width = read_i32(bytes, 18);
    let height_raw = read_i32(bytes, 22);
    let planes = read_u16(bytes, 26);
    let bpp = read_u16(bytes, 28);
    let compression = read_u32(bytes, 30);
    if width <= 0 || height_raw == 0 {
        return Err(Error::CorruptHeader(format!(
            "declared dimensions {width}x{height_raw}"
        )));
    }
    if planes != 1 {
        return Err(Error::CorruptHeader(format!("planes = {planes}")));
    }
    if bpp != 24 {
        return Err(Error::UnsupportedBmp(format!(
            "{bpp} bits per pixel (only 24 supported)"
        )));
    }
    if compression != 0 {
        return Err(Error::UnsupportedBmp(format!(
            "compression type {compression} (only uncompressed supported)"
        )));
    }

    let top_down = height_raw < 0;
    let width = width as u32;
    let height = height_raw.unsigned_abs();
    let offset = read_u32(bytes, 10) as usize;
    let stride = row_size(width);
    let need = offset + stride * height as usize;
    if offset < PIXEL_OFFSET || bytes.len() < need {
        return Err(Error::CorruptHeader(format!(
            "pixel data needs {need} bytes, file has {}",
            bytes.len()
        )));
    }

    let mut pixels = vec![Rgb::BLACK; width as usize * height as usize];
    for file_row in 0..height {
        let image_row = if top_down {
            file_row
        } else {
            height - 1 - file_row
        };
        let src = offset + file_row as usize * stride;
        let dst = image_row as usize * width as usize;
        for col in 0..width as usize {
            let at = src + col * 3;
            pixels[dst + col] = Rgb::new(bytes[at + 2], bytes[at + 1], bytes[at]);
        }
    }
    ColorImage::from_pixels(width, height, pixels)
}

/// Encodes the image as a bottom-up 24-bit uncompressed BMP.
pub fn encode_bmp(img: &ColorImage) -> Vec<u8> {
    let width = img.width();
    let height = img.height();
    let stride = row_size(width);
    let pixel_bytes = stride * height as usize;
    let file_size = PIXEL_OFFSET + pixel_bytes;

    let mut out = Vec::with_capacity(file_size);
    out.extend_from_slice(b"BM");
    out.extend_from_slice(&(file_size as u32).to_le_bytes());
    out.extend_from_slice(&[0; 4]); // reserved
    out.extend_from_slice(&(PIXEL_OFFSET as u32).to_le_bytes());

    out.extend_from_slice(&(INFO_HEADER_SIZE as u32).to_le_bytes());
    out.extend_from_slice(&(width as i32).to_le_bytes());
    out.extend_from_slice(&(height as i32).to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // planes
    out.extend_from_slice(&24u16.to_le_bytes()); // bits per pixel
    out.extend_from_slice(&0u32.to_le_bytes()); // compression: none
    out.extend_from_slice(&(pixel_bytes as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes()); // x pixels per meter
    out.extend_from_slice(&0u32.to_le_bytes()); // y pixels per meter
    out.extend_from_slice(&0u32.to_le_bytes()); // colors used
    out.extend_from_slice(&0u32.to_le_bytes()); // important colors

    let pad = stride - width as usize * 3;
    for file_row in 0..height {
        let image_row = height - 1 - file_row;
        for col in 0..width {
            let p = img.get(image_row, col);
            out.extend_from_slice(&[p.b, p.g, p.r]);
        }
        out.extend_from_slice(&[0u8; 3][..pad]);
    }
    out
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::UnwritableFile {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes a color image as 24-bit BMP.
pub fn save_bmp(img: &ColorImage, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &encode_bmp(img))
}

/// Writes a gray image as 24-bit BMP with replicated channels.
pub fn save_gray_bmp(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    save_bmp(&img.to_color(), path)
}

/// Writes a binary mask as 24-bit BMP, foreground black on white.
pub fn save_binary_bmp(img: &BinaryImage, path: impl AsRef<Path>) -> Result<()> {
    save_gray_bmp(&img.to_gray_rendering(), path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decode_reference_1x1() {
        // 1x1 image with pixel (r=10, g=20, b=30), written out by hand:
        // 54-byte header, one row of 3 pixel bytes (BGR) + 1 padding byte.
        #[rustfmt::skip]
        let bytes: Vec<u8> = vec![
            // file header
            0x42, 0x4D,             // 'BM'
            0x3A, 0x00, 0x00, 0x00, // file size = 58
            0x00, 0x00, 0x00, 0x00, // reserved
            0x36, 0x00, 0x00, 0x00, // pixel offset = 54
            // info header
            0x28, 0x00, 0x00, 0x00, // header size = 40
            0x01, 0x00, 0x00, 0x00, // width = 1
            0x01, 0x00, 0x00, 0x00, // height = 1
            0x01, 0x00,             // planes = 1
            0x18, 0x00,             // bpp = 24
            0x00, 0x00, 0x00, 0x00, // compression = 0
            0x04, 0x00, 0x00, 0x00, // image size = 4
            0x00, 0x00, 0x00, 0x00, // x ppm
            0x00, 0x00, 0x00, 0x00, // y ppm
            0x00, 0x00, 0x00, 0x00, // colors used
            0x00, 0x00, 0x00, 0x00, // important colors
            // pixel row: B, G, R, padding
            0x1E, 0x14, 0x0A, 0x00,
        ];
        let img = decode_bmp(&bytes).unwrap();
        assert_eq!(img.width(), 1);
        assert_eq!(img.height(), 1);
        assert_eq!(img.get(0, 0), Rgb::new(10, 20, 30));
    }

    #[test]
    fn round_trip_2x2_white() {
        let img = ColorImage::filled(2, 2, Rgb::WHITE).unwrap();
        let decoded = decode_bmp(&encode_bmp(&img)).unwrap();
        assert_eq!(decoded, img);
    }

    #[test]
    fn zero_length_file_is_corrupt_header() {
        match decode_bmp(&[]) {
            Err(Error::CorruptHeader(_)) => {}
            other => panic!("expected corrupt-header error, got {other:?}"),
        }
    }

    #[test]
    fn bad_magic_is_corrupt_header() {
        let mut bytes = encode_bmp(&ColorImage::filled(1, 1, Rgb::BLACK).unwrap());
        bytes[0] = b'X';
        assert!(matches!(decode_bmp(&bytes), Err(Error::CorruptHeader(_))));
    }

    #[test]
    fn unsupported_bit_depth_reported_distinctly() {
        let mut bytes = encode_bmp(&ColorImage::filled(1, 1, Rgb::BLACK).unwrap());
        bytes[28] = 8; // declare 8 bpp
        assert!(matches!(decode_bmp(&bytes), Err(Error::UnsupportedBmp(_))));
    }

    #[test]
    fn truncated_pixel_data_is_corrupt() {
        let bytes = encode_bmp(&ColorImage::filled(4, 4, Rgb::WHITE).unwrap());
        assert!(matches!(
            decode_bmp(&bytes[..bytes.len() - 5]),
            Err(Error::CorruptHeader(_))
        ));
    }

    #[test]
    fn top_down_rows_accepted() {
        // Two rows: top row red, bottom row blue, declared top-down
        // (negative height) so file row order matches image row order.
        let mut img = ColorImage::filled(1, 2, Rgb::new(255, 0, 0)).unwrap();
        img.set(1, 0, Rgb::new(0, 0, 255));
        let mut bytes = encode_bmp(&img);
        bytes[22..26].copy_from_slice(&(-2i32).to_le_bytes());
        // encode_bmp wrote bottom-up (blue row first); flipping the sign
        // makes the decoder read it as top-down, swapping the rows.
        let decoded = decode_bmp(&bytes).unwrap();
        assert_eq!(decoded.get(0, 0), Rgb::new(0, 0, 255));
        assert_eq!(decoded.get(1, 0), Rgb::new(255, 0, 0));
    }

    proptest! {
        #[test]
        fn round_trip_preserves_pixels(
            width in 1u32..12,
            height in 1u32..12,
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let pixels = (0..width as usize * height as usize)
                .map(|_| Rgb::new(rng.gen(), rng.gen(), rng.gen()))
                .collect();
            let img = ColorImage::from_pixels(width, height, pixels).unwrap();
            let decoded = decode_bmp(&encode_bmp(&img)).unwrap();
            prop_assert_eq!(decoded, img);
        }
    }
}
