//! Drawing helpers for inspection outputs: box outlines over a
//! rendering of the binarized image.

use crate::ccl::BoundingBox;
use crate::imaging::{BinaryImage, ColorImage, Rgb};
use crate::pipeline::SegmentBox;

/// Paints the 1-pixel perimeter of `bounds` onto `img`. The box must
/// lie inside the image.
pub fn draw_box_outline(img: &mut ColorImage, bounds: &BoundingBox, color: Rgb) {
    debug_assert!(bounds.row_end < img.height() && bounds.col_end < img.width());
    for c in bounds.col_start..=bounds.col_end {
        img.set(bounds.row_start, c, color);
        img.set(bounds.row_end, c, color);
    }
    for r in bounds.row_start..=bounds.row_end {
        img.set(r, bounds.col_start, color);
        img.set(r, bounds.col_end, color);
    }
}

/// Renders the binarized image (foreground black on white) and outlines
/// every segment box in black.
pub fn render_overlay(binary: &BinaryImage, boxes: &[SegmentBox]) -> ColorImage {
    let mut img = binary.to_gray_rendering().to_color();
    for b in boxes {
        draw_box_outline(&mut img, &b.bounds, Rgb::BLACK);
    }
    img
}
