//! Global skew estimation from an edge map.
//!
//! Text pages produce long near-horizontal runs; voting over a narrow
//! angle band around 90° finds the dominant run direction, and the
//! deviation of that peak from 90° is the page skew.

use super::BinaryImage;
use crate::hough::{vote, HoughParams};

/// Estimated page skew in degrees. Rotating the image by `degrees`
/// (see [`super::rotate`]) straightens the content.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewEstimate {
    pub degrees: f64,
    /// Set when the foreground is too sparse to carry a meaningful peak
    /// (fewer than two pixels agreed on any line); `degrees` is 0 then.
    pub unreliable: bool,
}

/// Sweeps θ ∈ [80°, 100°] in 0.5° steps and returns 90° − θ*, where θ*
/// is the angle of the single busiest accumulator cell. A short
/// horizontal run votes identically into several adjacent angles, so
/// ties prefer the angle closest to 90° (an exactly straight page reads
/// as 0). The result lies in [−10°, +10°].
pub fn estimate_skew(edge_map: &BinaryImage) -> SkewEstimate {
    let params = HoughParams::new(80.0, 100.0, 0.5, 0, 1).expect("fixed sweep is valid");
    let acc = vote(edge_map, &params).expect("params are valid");
    let mut peak_votes = 0u32;
    let mut peak_theta = 90.0_f64;
    for k in 0..acc.n_theta() {
        let theta = acc.theta_degrees(k);
        for rho_row in 0..acc.n_rho() {
            let v = acc.votes()[rho_row * acc.n_theta() + k];
            if v > peak_votes
                || (v == peak_votes && v > 0 && (theta - 90.0).abs() < (peak_theta - 90.0).abs())
            {
                peak_votes = v;
                peak_theta = theta;
            }
        }
    }
    if peak_votes < 2 {
        return SkewEstimate {
            degrees: 0.0,
            unreliable: true,
        };
    }
    SkewEstimate {
        degrees: 90.0 - peak_theta,
        unreliable: false,
    }
}
