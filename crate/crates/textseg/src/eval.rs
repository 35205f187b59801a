//! Synthetic page generation with ground truth, and box-level scoring
//! of segmentation output against that truth.
//!
//! Matching rule: a prediction overlaps a ground-truth box when their
//! IoU reaches the threshold, or when the prediction covers at least
//! half of the truth box's area (the 50% case counts). Each truth box
//! is then exactly one of: correct (one-to-one with a prediction),
//! over-segmented (hit by several predictions), under-segmented (its
//! sole prediction also spans other truth boxes), or missed.
//! Predictions overlapping nothing are spurious.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ccl::BoundingBox;
use crate::error::{Error, Result};
use crate::imaging::{rotate, ColorImage, GrayImage, RotationMap};
use crate::pipeline::{SegmentKind, SegmentationResult};
use crate::records::BoxRecord;

/// Page margin around the text block, in pixels.
pub const PAGE_MARGIN: u32 = 20;

/// Pixel budget for generated pages.
const MAX_PAGE_PIXELS: u64 = 1 << 26;

/// Parameters of a generated test page. Words are 2–4 solid character
/// cells; everything else is explicit.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutSpec {
    pub n_lines: u32,
    pub words_per_line: u32,
    pub char_width: u32,
    pub char_height: u32,
    /// Background columns between characters of one word.
    pub intra_word_gap: u32,
    /// Background columns between words.
    pub inter_word_gap: u32,
    /// Background rows between lines.
    pub inter_line_gap: u32,
    /// Per-pixel probability of salt-and-pepper noise.
    pub noise_prob: f64,
    /// Page tilt applied after rendering, degrees clockwise.
    pub skew_deg: f64,
    pub seed: u64,
}

impl Default for LayoutSpec {
    /// A dense document page: gaps sized so the line stage bridges
    /// neighbouring words (the inter-word gap in the edge map is 50,
    /// exactly the 50-pixel line bridge) while the word stage keeps
    /// them apart (text gap 52 > the 20-pixel word bridge).
    fn default() -> LayoutSpec {
        LayoutSpec {
            n_lines: 10,
            words_per_line: 8,
            char_width: 7,
            char_height: 6,
            intra_word_gap: 4,
            inter_word_gap: 51,
            inter_line_gap: 24,
            noise_prob: 0.0,
            skew_deg: 0.0,
            seed: 0,
        }
    }
}

impl LayoutSpec {
    fn validate(&self) -> Result<()> {
        let positive = [
            ("n_lines", self.n_lines),
            ("words_per_line", self.words_per_line),
            ("char_width", self.char_width),
            ("char_height", self.char_height),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(Error::InvalidLayout(format!("{name} must be positive")));
            }
        }
        if self.noise_prob.is_nan() || !(0.0..=1.0).contains(&self.noise_prob) {
            return Err(Error::InvalidLayout(format!(
                "noise probability {} outside [0, 1]",
                self.noise_prob
            )));
        }
        if self.skew_deg.is_nan() || self.skew_deg.abs() > 45.0 {
            return Err(Error::InvalidLayout(format!(
                "skew {}° outside ±45°",
                self.skew_deg
            )));
        }
        Ok(())
    }
}

/// The box sets for one image: line hulls plus word hulls with their
/// line indices. Used for ground truth and for grouped predictions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBoxes {
    pub image_id: String,
    pub lines: Vec<BoundingBox>,
    /// (hull, index into `lines` when known)
    pub words: Vec<(BoundingBox, Option<usize>)>,
}

impl ImageBoxes {
    pub fn to_records(&self) -> Vec<BoxRecord> {
        let lines = self.lines.iter().map(|b| BoxRecord {
            image_id: self.image_id.clone(),
            kind: SegmentKind::Line,
            parent: None,
            bounds: *b,
        });
        let words = self.words.iter().map(|(b, parent)| BoxRecord {
            image_id: self.image_id.clone(),
            kind: SegmentKind::Word,
            parent: *parent,
            bounds: *b,
        });
        lines.chain(words).collect()
    }

    pub fn from_result(result: &SegmentationResult) -> ImageBoxes {
        ImageBoxes {
            image_id: result.image_id.clone(),
            lines: result.lines.iter().map(|s| s.bounds).collect(),
            words: result.words.iter().map(|s| (s.bounds, s.parent)).collect(),
        }
    }
}

/// Groups records by image id, in order of first appearance.
pub fn group_records(records: &[BoxRecord]) -> Vec<ImageBoxes> {
    let mut groups: Vec<ImageBoxes> = Vec::new();
    for r in records {
        let group = match groups.iter_mut().find(|g| g.image_id == r.image_id) {
            Some(g) => g,
            None => {
                groups.push(ImageBoxes {
                    image_id: r.image_id.clone(),
                    lines: Vec::new(),
                    words: Vec::new(),
                });
                groups.last_mut().expect("just pushed")
            }
        };
        match r.kind {
            SegmentKind::Line => group.lines.push(r.bounds),
            SegmentKind::Word => group.words.push((r.bounds, r.parent)),
        }
    }
    groups
}

/// A generated page and its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedPage {
    pub image: ColorImage,
    pub truth: ImageBoxes,
}

/// Forward-maps a box through a rotation and returns the axis-aligned
/// hull of its corners, clamped to the destination canvas.
fn rotate_box(map: &RotationMap, b: &BoundingBox) -> BoundingBox {
    let corners = [
        (b.row_start, b.col_start),
        (b.row_start, b.col_end),
        (b.row_end, b.col_start),
        (b.row_end, b.col_end),
    ];
    let mut min_x = f64::INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for (r, c) in corners {
        let (x, y) = map.forward(c as f64, r as f64);
        min_x = min_x.min(x);
        min_y = min_y.min(y);
        max_x = max_x.max(x);
        max_y = max_y.max(y);
    }
    let clamp = |v: f64, len: u32| (v as i64).clamp(0, len as i64 - 1) as u32;
    BoundingBox::new(
        clamp(min_y.floor(), map.dest_height()),
        clamp(min_x.floor(), map.dest_width()),
        clamp(max_y.ceil(), map.dest_height()),
        clamp(max_x.ceil(), map.dest_width()),
    )
}

/// Renders a synthetic text page: solid character cells grouped into
/// words and lines, optional page tilt, optional salt-and-pepper noise.
/// The returned truth holds the text hulls in the output image's frame
/// (corner hulls when tilted). Fully deterministic in the seed.
pub fn generate_page(spec: &LayoutSpec, image_id: &str) -> Result<GeneratedPage> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // Word shapes first: 2–4 characters each.
    let chars_per_word: Vec<Vec<u32>> = (0..spec.n_lines)
        .map(|_| {
            (0..spec.words_per_line)
                .map(|_| rng.gen_range(2..=4))
                .collect()
        })
        .collect();

    let word_width = |chars: u32| {
        chars as u64 * spec.char_width as u64 + (chars - 1) as u64 * spec.intra_word_gap as u64
    };
    let line_width = |words: &[u32]| {
        words.iter().map(|&c| word_width(c)).sum::<u64>()
            + (words.len() as u64 - 1) * spec.inter_word_gap as u64
    };
    let width = 2 * PAGE_MARGIN as u64
        + chars_per_word
            .iter()
            .map(|w| line_width(w))
            .max()
            .expect("n_lines >= 1");
    let height = 2 * PAGE_MARGIN as u64
        + spec.n_lines as u64 * spec.char_height as u64
        + (spec.n_lines as u64 - 1) * spec.inter_line_gap as u64;
    if width * height > MAX_PAGE_PIXELS || width > u32::MAX as u64 || height > u32::MAX as u64 {
        return Err(Error::LayoutOverflow(format!(
            "{width}x{height} exceeds the {MAX_PAGE_PIXELS}-pixel budget"
        )));
    }
    let (width, height) = (width as u32, height as u32);

    // Render black cells on white and record the text hulls.
    let mut gray = GrayImage::filled(width, height, 255)?;
    let mut lines = Vec::new();
    let mut words = Vec::new();
    for (li, line_words) in chars_per_word.iter().enumerate() {
        let top = PAGE_MARGIN + li as u32 * (spec.char_height + spec.inter_line_gap);
        let bottom = top + spec.char_height - 1;
        let mut cursor = PAGE_MARGIN;
        let mut line_right = cursor;
        for &chars in line_words {
            let right = cursor + word_width(chars) as u32 - 1;
            for k in 0..chars {
                let left = cursor + k * (spec.char_width + spec.intra_word_gap);
                for r in top..=bottom {
                    for c in left..left + spec.char_width {
                        gray.set(r, c, 0);
                    }
                }
            }
            words.push((BoundingBox::new(top, cursor, bottom, right), Some(li)));
            line_right = right;
            cursor = right + 1 + spec.inter_word_gap;
        }
        lines.push(BoundingBox::new(top, PAGE_MARGIN, bottom, line_right));
    }

    // Tilt the page and carry the truth hulls into the tilted frame.
    if spec.skew_deg != 0.0 {
        let map = RotationMap::new(width, height, spec.skew_deg)?;
        gray = rotate(&gray, spec.skew_deg)?;
        for b in &mut lines {
            *b = rotate_box(&map, b);
        }
        for (b, _) in &mut words {
            *b = rotate_box(&map, b);
        }
    }

    // Salt-and-pepper: each pixel rewritten to black or white with
    // probability `noise_prob`.
    if spec.noise_prob > 0.0 {
        for r in 0..gray.height() {
            for c in 0..gray.width() {
                if rng.gen::<f64>() < spec.noise_prob {
                    gray.set(r, c, if rng.gen::<bool>() { 255 } else { 0 });
                }
            }
        }
    }

    Ok(GeneratedPage {
        image: gray.to_color(),
        truth: ImageBoxes {
            image_id: image_id.to_string(),
            lines,
            words,
        },
    })
}

/// True when `pred` overlaps `gt` under the matching rule.
pub fn box_overlaps(pred: &BoundingBox, gt: &BoundingBox, iou_threshold: f64) -> bool {
    let inter = pred.intersect(gt).map_or(0, |b| b.area());
    if inter == 0 {
        return false;
    }
    let union = pred.area() + gt.area() - inter;
    inter as f64 / union as f64 >= iou_threshold || 2 * inter >= gt.area()
}

/// Box-level outcome counts for one segment kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KindTally {
    pub ground_truth: usize,
    pub predicted: usize,
    pub correct: usize,
    pub over_segmented: usize,
    pub under_segmented: usize,
    pub missed: usize,
    pub spurious: usize,
}

impl KindTally {
    pub fn percent_correct(&self) -> f64 {
        if self.ground_truth == 0 {
            100.0
        } else {
            100.0 * self.correct as f64 / self.ground_truth as f64
        }
    }

    pub fn add(&mut self, other: &KindTally) {
        self.ground_truth += other.ground_truth;
        self.predicted += other.predicted;
        self.correct += other.correct;
        self.over_segmented += other.over_segmented;
        self.under_segmented += other.under_segmented;
        self.missed += other.missed;
        self.spurious += other.spurious;
    }
}

/// Scores one kind's predictions against its ground truth.
pub fn score_boxes(preds: &[BoundingBox], truths: &[BoundingBox], iou_threshold: f64) -> KindTally {
    let mut truth_hits = vec![0usize; truths.len()];
    let mut truth_pred = vec![usize::MAX; truths.len()];
    let mut pred_hits = vec![0usize; preds.len()];
    for (pi, p) in preds.iter().enumerate() {
        for (ti, t) in truths.iter().enumerate() {
            if box_overlaps(p, t, iou_threshold) {
                truth_hits[ti] += 1;
                truth_pred[ti] = pi;
                pred_hits[pi] += 1;
            }
        }
    }
    let mut tally = KindTally {
        ground_truth: truths.len(),
        predicted: preds.len(),
        ..KindTally::default()
    };
    for ti in 0..truths.len() {
        match truth_hits[ti] {
            0 => tally.missed += 1,
            1 => {
                if pred_hits[truth_pred[ti]] == 1 {
                    tally.correct += 1;
                } else {
                    tally.under_segmented += 1;
                }
            }
            _ => tally.over_segmented += 1,
        }
    }
    tally.spurious = pred_hits.iter().filter(|&&h| h == 0).count();
    tally
}

/// Per-image scoring outcome, split by kind.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub image_id: String,
    pub iou_threshold: f64,
    pub lines: KindTally,
    pub words: KindTally,
}

/// Scores grouped predictions against ground truth for one image.
pub fn evaluate_sets(
    pred: &ImageBoxes,
    truth: &ImageBoxes,
    iou_threshold: f64,
) -> Result<EvalReport> {
    if pred.image_id != truth.image_id {
        return Err(Error::ImageIdMismatch {
            predicted: pred.image_id.clone(),
            truth: truth.image_id.clone(),
        });
    }
    let pred_words: Vec<BoundingBox> = pred.words.iter().map(|(b, _)| *b).collect();
    let truth_words: Vec<BoundingBox> = truth.words.iter().map(|(b, _)| *b).collect();
    Ok(EvalReport {
        image_id: pred.image_id.clone(),
        iou_threshold,
        lines: score_boxes(&pred.lines, &truth.lines, iou_threshold),
        words: score_boxes(&pred_words, &truth_words, iou_threshold),
    })
}

/// Scores a pipeline result against ground truth.
pub fn evaluate(
    result: &SegmentationResult,
    truth: &ImageBoxes,
    iou_threshold: f64,
) -> Result<EvalReport> {
    evaluate_sets(&ImageBoxes::from_result(result), truth, iou_threshold)
}

pub const EVAL_CSV_HEADER: &str = "image_id,kind,ground_truth,predicted,correct,over_segmented,under_segmented,missed,spurious,percent_correct";

/// Sums the per-image tallies: (lines, words).
pub fn summarize(reports: &[EvalReport]) -> (KindTally, KindTally) {
    let mut lines = KindTally::default();
    let mut words = KindTally::default();
    for r in reports {
        lines.add(&r.lines);
        words.add(&r.words);
    }
    (lines, words)
}

fn eval_csv_row(out: &mut String, image_id: &str, kind: &str, t: &KindTally) {
    out.push_str(&format!(
        "{},{},{},{},{},{},{},{},{},{:.2}\n",
        image_id,
        kind,
        t.ground_truth,
        t.predicted,
        t.correct,
        t.over_segmented,
        t.under_segmented,
        t.missed,
        t.spurious,
        t.percent_correct(),
    ));
}

/// Serializes reports as CSV: two rows per image (line, word) plus an
/// `ALL` summary pair.
pub fn eval_csv(reports: &[EvalReport]) -> String {
    let mut out = String::from(EVAL_CSV_HEADER);
    out.push('\n');
    for r in reports {
        eval_csv_row(&mut out, &r.image_id, "line", &r.lines);
        eval_csv_row(&mut out, &r.image_id, "word", &r.words);
    }
    let (lines, words) = summarize(reports);
    eval_csv_row(&mut out, "ALL", "line", &lines);
    eval_csv_row(&mut out, "ALL", "word", &words);
    out
}

/// Plain-text score table for terminal output.
pub fn format_table(reports: &[EvalReport]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<20} {:<5} {:>6} {:>6} {:>8} {:>6} {:>6} {:>7} {:>9} {:>9}\n",
        "image",
        "kind",
        "truth",
        "pred",
        "correct",
        "over",
        "under",
        "missed",
        "spurious",
        "%correct"
    ));
    let mut row = |id: &str, kind: &str, t: &KindTally| {
        out.push_str(&format!(
            "{:<20} {:<5} {:>6} {:>6} {:>8} {:>6} {:>6} {:>7} {:>9} {:>9.2}\n",
            id,
            kind,
            t.ground_truth,
            t.predicted,
            t.correct,
            t.over_segmented,
            t.under_segmented,
            t.missed,
            t.spurious,
            t.percent_correct(),
        ));
    };
    for r in reports {
        row(&r.image_id, "line", &r.lines);
        row(&r.image_id, "word", &r.words);
    }
    let (lines, words) = summarize(reports);
    row("ALL", "line", &lines);
    row("ALL", "word", &words);
    out
}
