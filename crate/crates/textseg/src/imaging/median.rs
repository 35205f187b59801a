//! 3×3 median despeckling for salt-and-pepper corruption.
//!
//! Each output intensity is the median of the 3×3 neighbourhood; at the
//! image border the window is clipped to the pixels that exist. Isolated
//! specks (up to four corrupted pixels in any window) are erased while
//! step edges pass through unchanged, so solid glyphs keep their hulls —
//! only lone corner pixels can be shaved off.

use super::GrayImage;

/// Replaces every intensity with its clipped-3×3-window median.
pub fn median3x3(img: &GrayImage) -> GrayImage {
    let (w, h) = (img.width(), img.height());
    let src = img.intensities();
    let mut out = Vec::with_capacity(src.len());
    for row in 0..h {
        let r0 = row.saturating_sub(1);
        let r1 = (row + 1).min(h - 1);
        for col in 0..w {
            let c0 = col.saturating_sub(1) as usize;
            let c1 = (col + 1).min(w - 1) as usize;
            let mut window = [0u8; 9];
            let mut n = 0;
            for r in r0..=r1 {
                let base = (r * w) as usize;
                for v in &src[base + c0..=base + c1] {
                    window[n] = *v;
                    n += 1;
                }
            }
            let buf = &mut window[..n];
            buf.sort_unstable();
            out.push(buf[n / 2]);
        }
    }
    GrayImage::from_intensities(w, h, out).expect("dimensions preserved")
}
