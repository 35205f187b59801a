//! (ρ,θ) Hough voting over a binary image, acceptance of sufficiently
//! voted lines, and synthesis of the bridged line image.
//!
//! A line is `x·cosθ + y·sinθ = ρ` with `x ≡ col`, `y ≡ row`, origin at
//! the top-left and y pointing down; θ is in degrees at the interface.
//! ρ is quantized by rounding half away from zero into unit-pixel bins.

use crate::error::{Error, Result};
use crate::imaging::{BinaryImage, GrayImage, PixelCoord};

/// One tuned parameter bundle: the swept angle range, the along-line gap
/// that still counts as the same run, and the vote floor for acceptance.
#[derive(Debug, Clone, PartialEq)]
pub struct HoughParams {
    pub theta_start: f64,
    pub theta_end: f64,
    pub delta_theta: f64,
    pub connect_gap: u32,
    pub min_votes: u32,
}

impl HoughParams {
    pub fn new(
        theta_start: f64,
        theta_end: f64,
        delta_theta: f64,
        connect_gap: u32,
        min_votes: u32,
    ) -> Result<HoughParams> {
        let p = HoughParams {
            theta_start,
            theta_end,
            delta_theta,
            connect_gap,
            min_votes,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ok_range = self.theta_start.is_finite()
            && self.theta_end.is_finite()
            && 0.0 <= self.theta_start
            && self.theta_start <= self.theta_end
            && self.theta_end <= 180.0;
        if !ok_range {
            return Err(Error::InvalidHoughParams(format!(
                "theta range [{}, {}] must satisfy 0 <= start <= end <= 180",
                self.theta_start, self.theta_end
            )));
        }
        if !(self.delta_theta.is_finite() && self.delta_theta > 0.0) {
            return Err(Error::InvalidHoughParams(format!(
                "delta_theta {} must be positive",
                self.delta_theta
            )));
        }
        if self.min_votes < 1 {
            return Err(Error::InvalidHoughParams(
                "min_votes must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Line-stage profile: near-horizontal sweep, wide bridging, high floor.
    pub fn line_profile() -> HoughParams {
        HoughParams {
            theta_start: 85.0,
            theta_end: 95.0,
            delta_theta: 1.0,
            connect_gap: 50,
            min_votes: 30,
        }
    }

    /// Word-stage profile: broad sweep, narrow bridging, low floor.
    pub fn word_profile() -> HoughParams {
        HoughParams {
            theta_start: 30.0,
            theta_end: 120.0,
            delta_theta: 1.0,
            connect_gap: 20,
            min_votes: 2,
        }
    }

    /// Swept angles in degrees: start, start+Δ, … up to end inclusive.
    pub fn thetas(&self) -> Vec<f64> {
        let n = ((self.theta_end - self.theta_start) / self.delta_theta).floor() as usize + 1;
        (0..n)
            .map(|k| self.theta_start + k as f64 * self.delta_theta)
            .collect()
    }
}

/// The (ρ,θ) vote table. Rows index ρ shifted by `rho_offset` so that
/// ρ = row − offset ∈ [−D, D] with D = ⌈diagonal⌉; columns index θ.
#[derive(Debug, Clone, PartialEq)]
pub struct HoughAccumulator {
    n_rho: usize,
    n_theta: usize,
    rho_offset: i64,
    votes: Vec<u32>,
    thetas_deg: Vec<f64>,
    trig: Vec<(f64, f64)>, // (cos, sin) per angle
}

impl HoughAccumulator {
    pub fn n_rho(&self) -> usize {
        self.n_rho
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn rho_offset(&self) -> i64 {
        self.rho_offset
    }

    pub fn theta_degrees(&self, theta_index: usize) -> f64 {
        self.thetas_deg[theta_index]
    }

    /// Votes in the cell for signed `rho` and angle index.
    pub fn votes_at(&self, rho: i64, theta_index: usize) -> u32 {
        let row = rho + self.rho_offset;
        assert!(row >= 0 && (row as usize) < self.n_rho && theta_index < self.n_theta);
        self.votes[row as usize * self.n_theta + theta_index]
    }

    pub fn votes(&self) -> &[u32] {
        &self.votes
    }

    fn quantize(&self, col: u32, row: u32, theta_index: usize) -> i64 {
        let (cos, sin) = self.trig[theta_index];
        (col as f64 * cos + row as f64 * sin).round() as i64
    }
}

/// An accepted accumulator cell together with the pixels that voted for it.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectedLine {
    pub rho: i64,
    /// Angle in degrees.
    pub theta: f64,
    pub theta_index: usize,
    pub votes: u32,
    pub supporters: Vec<PixelCoord>,
}

/// Casts one vote per foreground pixel per swept angle.
pub fn vote(binary: &BinaryImage, params: &HoughParams) -> Result<HoughAccumulator> {
    params.validate()?;
    let w = binary.width() as f64;
    let h = binary.height() as f64;
    let rho_offset = (w * w + h * h).sqrt().ceil() as i64;
    let thetas_deg = params.thetas();
    let trig: Vec<(f64, f64)> = thetas_deg
        .iter()
        .map(|t| {
            let (sin, cos) = t.to_radians().sin_cos();
            (cos, sin)
        })
        .collect();
    let n_theta = thetas_deg.len();
    let n_rho = (2 * rho_offset + 1) as usize;
    let mut acc = HoughAccumulator {
        n_rho,
        n_theta,
        rho_offset,
        votes: vec![0; n_rho * n_theta],
        thetas_deg,
        trig,
    };
    for p in binary.foreground() {
        for k in 0..n_theta {
            let row = (acc.quantize(p.col, p.row, k) + rho_offset) as usize;
            acc.votes[row * n_theta + k] += 1;
        }
    }
    Ok(acc)
}

/// Returns every cell holding at least `min_votes`, with its supporter
/// list rebuilt by a second pass over the foreground. Ordered by
/// descending votes, then ascending (ρ, θ).
pub fn accept_lines(
    acc: &HoughAccumulator,
    params: &HoughParams,
    binary: &BinaryImage,
) -> Vec<DetectedLine> {
    let mut slot: Vec<Option<u32>> = vec![None; acc.votes.len()];
    let mut lines: Vec<DetectedLine> = Vec::new();
    for rho_row in 0..acc.n_rho {
        for k in 0..acc.n_theta {
            let idx = rho_row * acc.n_theta + k;
            let v = acc.votes[idx];
            if v >= params.min_votes {
                slot[idx] = Some(lines.len() as u32);
                lines.push(DetectedLine {
                    rho: rho_row as i64 - acc.rho_offset,
                    theta: acc.thetas_deg[k],
                    theta_index: k,
                    votes: v,
                    supporters: Vec::with_capacity(v as usize),
                });
            }
        }
    }
    if !lines.is_empty() {
        for p in binary.foreground() {
            for k in 0..acc.n_theta {
                let row = (acc.quantize(p.col, p.row, k) + acc.rho_offset) as usize;
                if let Some(s) = slot[row * acc.n_theta + k] {
                    lines[s as usize].supporters.push(p);
                }
            }
        }
    }
    for line in &lines {
        debug_assert_eq!(line.votes as usize, line.supporters.len());
    }
    lines.sort_unstable_by(|a, b| {
        b.votes
            .cmp(&a.votes)
            .then(a.rho.cmp(&b.rho))
            .then(a.theta_index.cmp(&b.theta_index))
    });
    lines
}

/// Builds the bridged line image: supporters of every accepted line are
/// copied, and along each line, consecutive supporters (ordered by their
/// projection onto the line direction) whose gap is at most `connect_gap`
/// are joined by a rasterized straight segment. Foreground pixels that
/// support no accepted line are not copied.
pub fn synthesize_hough_image(
    binary: &BinaryImage,
    lines: &[DetectedLine],
    params: &HoughParams,
) -> BinaryImage {
    let mut out = BinaryImage::blank(binary.width(), binary.height())
        .expect("input image dimensions are valid");
    let max_gap = params.connect_gap as f64;
    // One trig entry per swept angle; lines share them via theta_index.
    let trig: Vec<(f64, f64)> = params
        .thetas()
        .into_iter()
        .map(|t| t.to_radians().sin_cos())
        .collect();
    let mut order: Vec<(f64, PixelCoord)> = Vec::new();
    for line in lines {
        let (sin, cos) = trig[line.theta_index];
        order.clear();
        order.extend(
            line.supporters
                .iter()
                .map(|&p| (cos * p.row as f64 - sin * p.col as f64, p)),
        );
        order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, p) in order.iter() {
            out.set(p.row, p.col, true);
        }
        for pair in order.windows(2) {
            // Gap from coordinate deltas, not key subtraction: the keys
            // carry position-dependent rounding (the near-zero trig term
            // is absorbed by large coordinates), which can inflate an
            // exactly-at-threshold gap by one ulp and drop the bridge.
            let (a, b) = (pair[0].1, pair[1].1);
            let gap = cos * (b.row as f64 - a.row as f64) - sin * (b.col as f64 - a.col as f64);
            if gap <= max_gap {
                draw_segment(&mut out, a, b);
            }
        }
    }
    out
}

/// Rasterizes the straight segment between two pixels (integer midpoint
/// stepping); both endpoints included.
fn draw_segment(out: &mut BinaryImage, a: PixelCoord, b: PixelCoord) {
    let (mut x, mut y) = (a.col as i64, a.row as i64);
    let (x1, y1) = (b.col as i64, b.row as i64);
    let dx = (x1 - x).abs();
    let dy = -(y1 - y).abs();
    let sx = if x < x1 { 1 } else { -1 };
    let sy = if y < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        out.set(y as u32, x as u32, true);
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Renders the vote table as a gray image (θ across, ρ down), votes
/// scaled so the busiest cell maps to 255.
pub fn render_accumulator(acc: &HoughAccumulator) -> GrayImage {
    let max = acc.votes.iter().copied().max().unwrap_or(0);
    let data = acc
        .votes
        .iter()
        .map(|&v| {
            if max == 0 {
                0
            } else {
                ((v as u64 * 255 + max as u64 / 2) / max as u64) as u8
            }
        })
        .collect();
    GrayImage::from_intensities(acc.n_theta as u32, acc.n_rho as u32, data)
        .expect("accumulator dimensions are valid")
}
