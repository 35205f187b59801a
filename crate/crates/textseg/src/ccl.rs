//! Non-recursive 4-connected component labeling with per-component
//! bounding boxes.
//!
//! Labels are assigned 1..N in row-major first-encounter order, so the
//! labeling is a pure function of the image. The implementation is
//! two-pass union-find; nothing recurses, so component size never
//! threatens the call stack.

use crate::imaging::{BinaryImage, PixelCoord};

/// Inclusive pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundingBox {
    pub row_start: u32,
    pub col_start: u32,
    pub row_end: u32,
    pub col_end: u32,
}

impl BoundingBox {
    pub fn new(row_start: u32, col_start: u32, row_end: u32, col_end: u32) -> BoundingBox {
        debug_assert!(row_start <= row_end && col_start <= col_end);
        BoundingBox {
            row_start,
            col_start,
            row_end,
            col_end,
        }
    }

    pub fn single(row: u32, col: u32) -> BoundingBox {
        BoundingBox::new(row, col, row, col)
    }

    /// Smallest box covering every coordinate; None for an empty set.
    pub fn hull_of(coords: impl IntoIterator<Item = PixelCoord>) -> Option<BoundingBox> {
        let mut iter = coords.into_iter();
        let first = iter.next()?;
        let mut hull = BoundingBox::single(first.row, first.col);
        for p in iter {
            hull.include(p.row, p.col);
        }
        Some(hull)
    }

    /// Grows the box to cover the given pixel.
    pub fn include(&mut self, row: u32, col: u32) {
        self.row_start = self.row_start.min(row);
        self.col_start = self.col_start.min(col);
        self.row_end = self.row_end.max(row);
        self.col_end = self.col_end.max(col);
    }

    pub fn width(&self) -> u32 {
        self.col_end - self.col_start + 1
    }

    pub fn height(&self) -> u32 {
        self.row_end - self.row_start + 1
    }

    pub fn area(&self) -> u64 {
        self.width() as u64 * self.height() as u64
    }

    /// Width over height.
    pub fn aspect_ratio(&self) -> f64 {
        self.width() as f64 / self.height() as f64
    }

    pub fn contains_point(&self, row: u32, col: u32) -> bool {
        (self.row_start..=self.row_end).contains(&row)
            && (self.col_start..=self.col_end).contains(&col)
    }

    pub fn contains_box(&self, inner: &BoundingBox) -> bool {
        self.row_start <= inner.row_start
            && self.col_start <= inner.col_start
            && self.row_end >= inner.row_end
            && self.col_end >= inner.col_end
    }

    pub fn intersect(&self, other: &BoundingBox) -> Option<BoundingBox> {
        let row_start = self.row_start.max(other.row_start);
        let col_start = self.col_start.max(other.col_start);
        let row_end = self.row_end.min(other.row_end);
        let col_end = self.col_end.min(other.col_end);
        (row_start <= row_end && col_start <= col_end)
            .then(|| BoundingBox::new(row_start, col_start, row_end, col_end))
    }

    /// Smallest box covering both.
    pub fn merged(&self, other: &BoundingBox) -> BoundingBox {
        BoundingBox::new(
            self.row_start.min(other.row_start),
            self.col_start.min(other.col_start),
            self.row_end.max(other.row_end),
            self.col_end.max(other.col_end),
        )
    }

    /// Intersection area over union area.
    pub fn iou(&self, other: &BoundingBox) -> f64 {
        let inter = self.intersect(other).map_or(0, |b| b.area());
        let union = self.area() + other.area() - inter;
        inter as f64 / union as f64
    }

    /// Shifts the box by non-negative offsets (crop-origin restoration).
    pub fn translated(&self, row_offset: u32, col_offset: u32) -> BoundingBox {
        BoundingBox::new(
            self.row_start + row_offset,
            self.col_start + col_offset,
            self.row_end + row_offset,
            self.col_end + col_offset,
        )
    }
}

/// One maximal 4-connected foreground region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// 1-based label in row-major first-encounter order.
    pub label: u32,
    /// Tight bounding box over the member pixels.
    pub bounds: BoundingBox,
    /// Member pixels in row-major order.
    pub pixels: Vec<PixelCoord>,
}

impl Component {
    pub fn pixel_count(&self) -> usize {
        self.pixels.len()
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new() -> UnionFind {
        UnionFind { parent: Vec::new() }
    }

    fn make_set(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        // Iterative path-halving keeps this stack-safe for any input.
        while self.parent[x as usize] != x {
            let grandparent = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grandparent;
            x = grandparent;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }

    fn len(&self) -> usize {
        self.parent.len()
    }
}

/// Partitions foreground pixels into maximal 4-connected components.
pub fn label_components(binary: &BinaryImage) -> Vec<Component> {
    const BG: u32 = u32::MAX;
    let w = binary.width() as usize;
    let h = binary.height() as usize;
    let mut provisional = vec![BG; w * h];
    let mut uf = UnionFind::new();

    for r in 0..h {
        for c in 0..w {
            if !binary.get(r as u32, c as u32) {
                continue;
            }
            let idx = r * w + c;
            let west = if c > 0 { provisional[idx - 1] } else { BG };
            let north = if r > 0 { provisional[idx - w] } else { BG };
            provisional[idx] = match (west, north) {
                (BG, BG) => uf.make_set(),
                (wl, BG) => wl,
                (BG, nl) => nl,
                (wl, nl) => {
                    uf.union(wl, nl);
                    wl.min(nl)
                }
            };
        }
    }

    let mut final_of_root = vec![BG; uf.len()];
    let mut components: Vec<Component> = Vec::new();
    for r in 0..h {
        for c in 0..w {
            let idx = r * w + c;
            if provisional[idx] == BG {
                continue;
            }
            let root = uf.find(provisional[idx]) as usize;
            let slot = if final_of_root[root] == BG {
                let slot = components.len();
                final_of_root[root] = slot as u32;
                components.push(Component {
                    label: slot as u32 + 1,
                    bounds: BoundingBox::single(r as u32, c as u32),
                    pixels: Vec::new(),
                });
                slot
            } else {
                final_of_root[root] as usize
            };
            let comp = &mut components[slot];
            comp.bounds.include(r as u32, c as u32);
            comp.pixels.push(PixelCoord::new(r as u32, c as u32));
        }
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::VecDeque;

    /// Independent BFS flood fill, also in row-major first-encounter
    /// order; returns each component's sorted pixel list.
    fn flood_fill_oracle(binary: &BinaryImage) -> Vec<Vec<PixelCoord>> {
        let w = binary.width();
        let h = binary.height();
        let mut seen = vec![false; (w * h) as usize];
        let mut out = Vec::new();
        for r in 0..h {
            for c in 0..w {
                if !binary.get(r, c) || seen[(r * w + c) as usize] {
                    continue;
                }
                let mut queue = VecDeque::from([(r, c)]);
                seen[(r * w + c) as usize] = true;
                let mut comp = Vec::new();
                while let Some((pr, pc)) = queue.pop_front() {
                    comp.push(PixelCoord::new(pr, pc));
                    let neighbors = [
                        (pr.wrapping_sub(1), pc),
                        (pr + 1, pc),
                        (pr, pc.wrapping_sub(1)),
                        (pr, pc + 1),
                    ];
                    for (nr, nc) in neighbors {
                        if nr < h && nc < w && binary.get(nr, nc) && !seen[(nr * w + nc) as usize] {
                            seen[(nr * w + nc) as usize] = true;
                            queue.push_back((nr, nc));
                        }
                    }
                }
                comp.sort();
                out.push(comp);
            }
        }
        out
    }

    #[test]
    fn empty_image_has_no_components() {
        let img = BinaryImage::blank(5, 5).unwrap();
        assert!(label_components(&img).is_empty());
    }

    #[test]
    fn diagonal_pixels_are_separate_components() {
        let mut img = BinaryImage::blank(2, 2).unwrap();
        img.set(0, 0, true);
        img.set(1, 1, true);
        let comps = label_components(&img);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].label, 1);
        assert_eq!(comps[0].pixels, vec![PixelCoord::new(0, 0)]);
        assert_eq!(comps[1].label, 2);
        assert_eq!(comps[1].pixels, vec![PixelCoord::new(1, 1)]);
    }

    #[test]
    fn matches_flood_fill_on_random_images() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for trial in 0..1000 {
            let density = [0.1, 0.3, 0.5, 0.7][trial % 4];
            let mask = (0..32 * 32).map(|_| rng.gen_bool(density)).collect();
            let img = BinaryImage::from_mask(32, 32, mask).unwrap();
            let comps = label_components(&img);
            let oracle = flood_fill_oracle(&img);
            assert_eq!(comps.len(), oracle.len());
            for (i, (comp, expected)) in comps.iter().zip(&oracle).enumerate() {
                assert_eq!(comp.label as usize, i + 1);
                assert_eq!(&comp.pixels, expected, "component {i} differs");
                assert_eq!(
                    comp.bounds,
                    BoundingBox::hull_of(expected.iter().copied()).unwrap()
                );
            }
        }
    }

    #[test]
    fn partition_covers_foreground_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        let mask = (0..24 * 24).map(|_| rng.gen_bool(0.4)).collect();
        let img = BinaryImage::from_mask(24, 24, mask).unwrap();
        let comps = label_components(&img);
        let total: usize = comps.iter().map(|c| c.pixel_count()).sum();
        assert_eq!(total, img.foreground_count());
        let mut seen = vec![false; 24 * 24];
        for comp in &comps {
            for p in &comp.pixels {
                let idx = (p.row * 24 + p.col) as usize;
                assert!(!seen[idx], "pixel {p:?} in two components");
                seen[idx] = true;
                assert!(img.get(p.row, p.col));
            }
        }
    }

    #[test]
    fn serpentine_worst_case_is_one_component() {
        // A snake filling a 512×512 image: even rows full, odd rows a
        // single connector alternating between right and left ends.
        let size = 512u32;
        let mut img = BinaryImage::blank(size, size).unwrap();
        let mut expected = 0usize;
        for r in 0..size {
            if r % 2 == 0 {
                for c in 0..size {
                    img.set(r, c, true);
                }
                expected += size as usize;
            } else {
                let c = if r % 4 == 1 { size - 1 } else { 0 };
                img.set(r, c, true);
                expected += 1;
            }
        }
        let comps = label_components(&img);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].pixel_count(), expected);
        assert_eq!(comps[0].bounds, BoundingBox::new(0, 0, size - 1, size - 1));
    }

    #[test]
    fn l_shaped_component_box() {
        let mut img = BinaryImage::blank(8, 8).unwrap();
        for r in 2..=5 {
            img.set(r, 1, true);
        }
        for c in 1..=4 {
            img.set(5, c, true);
        }
        let comps = label_components(&img);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].bounds, BoundingBox::new(2, 1, 5, 4));
    }

    #[test]
    fn single_pixel_box() {
        let mut img = BinaryImage::blank(10, 10).unwrap();
        img.set(3, 7, true);
        let comps = label_components(&img);
        assert_eq!(comps[0].bounds, BoundingBox::new(3, 7, 3, 7));
        assert_eq!(comps[0].bounds.area(), 1);
    }

    #[test]
    fn box_geometry_helpers() {
        let a = BoundingBox::new(0, 0, 9, 19);
        assert_eq!((a.width(), a.height(), a.area()), (20, 10, 200));
        assert_eq!(a.aspect_ratio(), 2.0);

        let b = BoundingBox::new(5, 10, 14, 29);
        let inter = a.intersect(&b).unwrap();
        assert_eq!(inter, BoundingBox::new(5, 10, 9, 19));
        assert_eq!(inter.area(), 50);
        assert_eq!(a.merged(&b), BoundingBox::new(0, 0, 14, 29));

        let disjoint = BoundingBox::new(50, 50, 60, 60);
        assert!(a.intersect(&disjoint).is_none());
        assert_eq!(a.iou(&disjoint), 0.0);
        assert_eq!(a.iou(&a), 1.0);
        // |A∩B| = 50, |A∪B| = 200 + 200 − 50 = 350.
        assert!((a.iou(&b) - 50.0 / 350.0).abs() < 1e-12);

        assert!(a.contains_box(&BoundingBox::new(1, 2, 3, 4)));
        assert!(!a.contains_box(&b));
        assert!(a.contains_point(9, 19));
        assert!(!a.contains_point(10, 19));

        assert_eq!(
            BoundingBox::new(1, 2, 3, 4).translated(10, 20),
            BoundingBox::new(11, 22, 13, 24)
        );
    }
}
