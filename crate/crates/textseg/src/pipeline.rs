//! Full segmentation pipeline: grayscale → optional deskew → binarize →
//! edge map → line stage → per-line word stage → optional plate filter.
//!
//! The line stage votes over the binarized edge map (edges of adjacent
//! words fall on a common near-horizontal line and bridge into one band);
//! the word stage votes over each line's crop of the text binarization,
//! where character bodies carry the mass and inter-word gaps exceed the
//! word-stage bridge limit.

use std::fs;
use std::path::Path;

use crate::binarize::{binarize, Polarity};
use crate::ccl::{label_components, BoundingBox, Component};
use crate::edges::edge_map;
use crate::error::{Error, Result};
use crate::hough::{accept_lines, render_accumulator, synthesize_hough_image, vote, HoughParams};
use crate::imaging::{
    estimate_skew, median3x3, rotate, to_gray, BinaryImage, ColorImage, GrayImage, SkewEstimate,
};

/// Geometry gate for license-plate candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateFilterConfig {
    pub aspect_min: f64,
    pub aspect_max: f64,
    pub rel_area_min: f64,
    pub rel_area_max: f64,
}

impl PlateFilterConfig {
    pub fn new(
        aspect_min: f64,
        aspect_max: f64,
        rel_area_min: f64,
        rel_area_max: f64,
    ) -> Result<PlateFilterConfig> {
        let cfg = PlateFilterConfig {
            aspect_min,
            aspect_max,
            rel_area_min,
            rel_area_max,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.aspect_min.is_finite()
            && self.aspect_min > 0.0
            && self.aspect_min < self.aspect_max)
        {
            return Err(Error::InvalidPlateFilter(format!(
                "aspect range [{}, {}] must satisfy 0 < min < max",
                self.aspect_min, self.aspect_max
            )));
        }
        if !(self.rel_area_min.is_finite()
            && self.rel_area_min > 0.0
            && self.rel_area_min < self.rel_area_max
            && self.rel_area_max <= 1.0)
        {
            return Err(Error::InvalidPlateFilter(format!(
                "relative area range [{}, {}] must satisfy 0 < min < max <= 1",
                self.rel_area_min, self.rel_area_max
            )));
        }
        Ok(())
    }

    /// Default gate: plates are wide (2–6× taller than high) and small
    /// against the frame (0.1%–5% of its area).
    pub fn default_lpr() -> PlateFilterConfig {
        PlateFilterConfig {
            aspect_min: 2.0,
            aspect_max: 6.0,
            rel_area_min: 0.001,
            rel_area_max: 0.05,
        }
    }
}

/// What a segment box delimits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    Line,
    Word,
}

impl SegmentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SegmentKind::Line => "line",
            SegmentKind::Word => "word",
        }
    }
}

/// One detected text unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentBox {
    pub kind: SegmentKind,
    pub bounds: BoundingBox,
    /// Index into the result's line list; None for lines themselves and
    /// for words found with the line stage skipped.
    pub parent: Option<usize>,
}

/// Named parameter bundle for one application domain.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainProfile {
    pub name: String,
    pub line_params: HoughParams,
    pub word_params: HoughParams,
    /// Median-despeckle the grayscale before any other stage. The word
    /// stage accepts any two collinear pixels, so leftover salt-and-pepper
    /// specks would chain text into one component; on by default.
    pub despeckle: bool,
    pub deskew_enabled: bool,
    pub invert_polarity: bool,
    pub skip_line_stage: bool,
    pub plate_filter: Option<PlateFilterConfig>,
}

impl DomainProfile {
    /// Scanned documents: dark text on paper, both stages, no filter.
    pub fn document() -> DomainProfile {
        DomainProfile {
            name: "document".into(),
            line_params: HoughParams::line_profile(),
            word_params: HoughParams::word_profile(),
            despeckle: true,
            deskew_enabled: false,
            invert_polarity: false,
            skip_line_stage: false,
            plate_filter: None,
        }
    }

    /// Business cards: same tuning as documents.
    pub fn bcr() -> DomainProfile {
        DomainProfile {
            name: "bcr".into(),
            ..DomainProfile::document()
        }
    }

    /// License plates: document tuning plus the plate geometry gate.
    pub fn lpr() -> DomainProfile {
        DomainProfile {
            name: "lpr".into(),
            plate_filter: Some(PlateFilterConfig::default_lpr()),
            ..DomainProfile::document()
        }
    }

    pub fn by_name(name: &str) -> Option<DomainProfile> {
        match name {
            "document" => Some(DomainProfile::document()),
            "bcr" => Some(DomainProfile::bcr()),
            "lpr" => Some(DomainProfile::lpr()),
            _ => None,
        }
    }

    /// Loads a profile from a key-value text file; see [`DomainProfile::parse`].
    pub fn from_file(path: impl AsRef<Path>) -> Result<DomainProfile> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::UnreadableFile {
            path: path.to_path_buf(),
            source,
        })?;
        DomainProfile::parse(&text)
    }

    /// Parses the plain-text profile format: one `key = value` per line,
    /// `#` comments, blank lines ignored. Unset keys keep the `document`
    /// profile's values; any `filter.*` key enables the plate filter
    /// (unset filter fields keep the default gate). Unknown keys and
    /// malformed values are reported with their line number.
    pub fn parse(text: &str) -> Result<DomainProfile> {
        let mut profile = DomainProfile {
            name: "custom".into(),
            ..DomainProfile::document()
        };
        let mut filter = PlateFilterConfig::default_lpr();
        let mut filter_enabled = false;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(cut) => &raw[..cut],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::ParseProfile {
                line: line_no,
                reason: format!("expected `key = value`, got {line:?}"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad_value = |what: &str| Error::ParseProfile {
                line: line_no,
                reason: format!("cannot parse {value:?} as {what} for key {key}"),
            };
            macro_rules! parse_as {
                ($ty:ty, $what:expr) => {
                    value.parse::<$ty>().map_err(|_| bad_value($what))?
                };
            }
            match key {
                "profile.name" => profile.name = value.to_string(),
                "profile.despeckle" => profile.despeckle = parse_as!(bool, "a boolean"),
                "profile.deskew" => profile.deskew_enabled = parse_as!(bool, "a boolean"),
                "profile.invert" => profile.invert_polarity = parse_as!(bool, "a boolean"),
                "profile.skip_line_stage" => profile.skip_line_stage = parse_as!(bool, "a boolean"),
                "line.theta_start" => profile.line_params.theta_start = parse_as!(f64, "a number"),
                "line.theta_end" => profile.line_params.theta_end = parse_as!(f64, "a number"),
                "line.delta_theta" => profile.line_params.delta_theta = parse_as!(f64, "a number"),
                "line.connect_gap" => {
                    profile.line_params.connect_gap = parse_as!(u32, "an integer")
                }
                "line.min_votes" => profile.line_params.min_votes = parse_as!(u32, "an integer"),
                "word.theta_start" => profile.word_params.theta_start = parse_as!(f64, "a number"),
                "word.theta_end" => profile.word_params.theta_end = parse_as!(f64, "a number"),
                "word.delta_theta" => profile.word_params.delta_theta = parse_as!(f64, "a number"),
                "word.connect_gap" => {
                    profile.word_params.connect_gap = parse_as!(u32, "an integer")
                }
                "word.min_votes" => profile.word_params.min_votes = parse_as!(u32, "an integer"),
                "filter.aspect_min" => {
                    filter.aspect_min = parse_as!(f64, "a number");
                    filter_enabled = true;
                }
                "filter.aspect_max" => {
                    filter.aspect_max = parse_as!(f64, "a number");
                    filter_enabled = true;
                }
                "filter.rel_area_min" => {
                    filter.rel_area_min = parse_as!(f64, "a number");
                    filter_enabled = true;
                }
                "filter.rel_area_max" => {
                    filter.rel_area_max = parse_as!(f64, "a number");
                    filter_enabled = true;
                }
                _ => {
                    return Err(Error::ParseProfile {
                        line: line_no,
                        reason: format!("unknown key {key:?}"),
                    })
                }
            }
        }
        profile.line_params.validate()?;
        profile.word_params.validate()?;
        if filter_enabled {
            filter.validate()?;
            profile.plate_filter = Some(filter);
        }
        Ok(profile)
    }
}

/// Debug images captured along the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct StageArtifacts {
    /// Grayscale input as segmented (after deskew if it ran).
    pub gray: GrayImage,
    pub skew: Option<SkewEstimate>,
    /// Text binarization.
    pub binary: BinaryImage,
    /// Binarized edge map.
    pub edges: BinaryImage,
    /// Line-stage accumulator rendered as a gray image.
    pub line_accumulator: Option<GrayImage>,
    /// Line-stage bridged image.
    pub line_hough: Option<BinaryImage>,
    /// Word-stage bridged images of all line crops, composited at their
    /// positions (full image when the line stage is skipped).
    pub word_hough: BinaryImage,
}

/// Everything one pipeline run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationResult {
    pub image_id: String,
    pub profile_name: String,
    pub lines: Vec<SegmentBox>,
    pub words: Vec<SegmentBox>,
    pub artifacts: Option<StageArtifacts>,
}

/// Hull of the component's pixels that are foreground in `original`;
/// None when the component consists purely of bridge pixels.
fn tighten(component: &Component, original: &BinaryImage) -> Option<BoundingBox> {
    BoundingBox::hull_of(
        component
            .pixels
            .iter()
            .copied()
            .filter(|p| original.get(p.row, p.col)),
    )
}

/// Shared vote → accept → synthesize → label → tighten sequence.
/// Returns the tightened boxes in label order plus the bridged image.
fn hough_stage(
    binary: &BinaryImage,
    params: &HoughParams,
) -> Result<(Vec<BoundingBox>, BinaryImage)> {
    let acc = vote(binary, params)?;
    let lines = accept_lines(&acc, params, binary);
    let synth = synthesize_hough_image(binary, &lines, params);
    let boxes = label_components(&synth)
        .iter()
        .filter_map(|c| tighten(c, binary))
        .collect();
    Ok((boxes, synth))
}

/// Minimum tightened height and width for a line box; anything smaller
/// is speckle, not a text line.
const MIN_LINE_SIDE: u32 = 3;

/// Line stage: bands of near-horizontal collinear foreground become one
/// box each. Boxes are tightened to the input's own foreground, and
/// boxes thinner than 3 pixels in either direction are dropped as noise.
pub fn segment_lines(binary: &BinaryImage, params: &HoughParams) -> Result<Vec<SegmentBox>> {
    let (boxes, _) = hough_stage(binary, params)?;
    Ok(boxes
        .into_iter()
        .filter(|b| b.width() >= MIN_LINE_SIDE && b.height() >= MIN_LINE_SIDE)
        .map(|bounds| SegmentBox {
            kind: SegmentKind::Line,
            bounds,
            parent: None,
        })
        .collect())
}

fn crop(binary: &BinaryImage, bounds: &BoundingBox) -> Result<BinaryImage> {
    if bounds.row_end >= binary.height() || bounds.col_end >= binary.width() {
        return Err(Error::BoxOutOfBounds);
    }
    let mut out = BinaryImage::blank(bounds.width(), bounds.height())?;
    for r in 0..bounds.height() {
        for c in 0..bounds.width() {
            out.set(r, c, binary.get(bounds.row_start + r, bounds.col_start + c));
        }
    }
    Ok(out)
}

/// Word stage for one line: crops the line's box from the full text
/// binarization, runs the word-profile sequence on the crop, and maps
/// the tightened boxes back to full-image coordinates.
pub fn segment_words(
    binary: &BinaryImage,
    line_bounds: &BoundingBox,
    parent: Option<usize>,
    params: &HoughParams,
) -> Result<Vec<SegmentBox>> {
    let (boxes, _) = word_stage(binary, line_bounds, params)?;
    Ok(boxes
        .into_iter()
        .map(|b| SegmentBox {
            kind: SegmentKind::Word,
            bounds: b,
            parent,
        })
        .collect())
}

fn word_stage(
    binary: &BinaryImage,
    line_bounds: &BoundingBox,
    params: &HoughParams,
) -> Result<(Vec<BoundingBox>, BinaryImage)> {
    let cropped = crop(binary, line_bounds)?;
    let (boxes, synth) = hough_stage(&cropped, params)?;
    let translated = boxes
        .into_iter()
        .map(|b| b.translated(line_bounds.row_start, line_bounds.col_start))
        .collect();
    Ok((translated, synth))
}

/// Keeps boxes whose aspect ratio and image-relative area both fall in
/// the configured ranges; with no config this is the identity.
pub fn plate_filter(
    words: &[SegmentBox],
    cfg: Option<&PlateFilterConfig>,
    image_width: u32,
    image_height: u32,
) -> Vec<SegmentBox> {
    let Some(cfg) = cfg else {
        return words.to_vec();
    };
    let image_area = image_width as f64 * image_height as f64;
    words
        .iter()
        .filter(|w| {
            let aspect = w.bounds.aspect_ratio();
            let rel_area = w.bounds.area() as f64 / image_area;
            aspect >= cfg.aspect_min
                && aspect <= cfg.aspect_max
                && rel_area >= cfg.rel_area_min
                && rel_area <= cfg.rel_area_max
        })
        .cloned()
        .collect()
}

/// Runs the whole pipeline on one image. With `collect_artifacts`, the
/// result carries every intermediate image for debug emission.
pub fn run_pipeline(
    img: &ColorImage,
    profile: &DomainProfile,
    image_id: &str,
    collect_artifacts: bool,
) -> Result<SegmentationResult> {
    let mut gray = to_gray(img);
    if profile.despeckle {
        gray = median3x3(&gray);
    }
    let mut skew = None;
    if profile.deskew_enabled {
        let pre_edges = edge_map(&gray).map_err(|e| e.in_stage("deskew"))?;
        let estimate = estimate_skew(&pre_edges);
        if !estimate.unreliable && estimate.degrees != 0.0 {
            gray = rotate(&gray, estimate.degrees).map_err(|e| e.in_stage("deskew"))?;
        }
        skew = Some(estimate);
    }

    let polarity = if profile.invert_polarity {
        Polarity::LightOnDark
    } else {
        Polarity::DarkOnLight
    };
    let binary = binarize(&gray, polarity).map_err(|e| e.in_stage("binarize"))?;
    let edges = edge_map(&gray).map_err(|e| e.in_stage("edge detection"))?;

    let mut lines: Vec<SegmentBox> = Vec::new();
    let mut words: Vec<SegmentBox> = Vec::new();
    let mut line_accumulator = None;
    let mut line_hough = None;
    let mut word_hough =
        BinaryImage::blank(binary.width(), binary.height()).expect("image dimensions are valid");

    if profile.skip_line_stage {
        let full = BoundingBox::new(0, 0, binary.height() - 1, binary.width() - 1);
        let (boxes, synth) = word_stage(&binary, &full, &profile.word_params)
            .map_err(|e| e.in_stage("word segmentation"))?;
        words.extend(boxes.into_iter().map(|bounds| SegmentBox {
            kind: SegmentKind::Word,
            bounds,
            parent: None,
        }));
        word_hough = synth;
    } else {
        if collect_artifacts {
            let acc =
                vote(&edges, &profile.line_params).map_err(|e| e.in_stage("line segmentation"))?;
            line_accumulator = Some(render_accumulator(&acc));
        }
        let (line_boxes, synth) = {
            let (boxes, synth) = hough_stage(&edges, &profile.line_params)
                .map_err(|e| e.in_stage("line segmentation"))?;
            (
                boxes
                    .into_iter()
                    .filter(|b| b.width() >= MIN_LINE_SIDE && b.height() >= MIN_LINE_SIDE)
                    .collect::<Vec<_>>(),
                synth,
            )
        };
        line_hough = Some(synth);
        for (index, bounds) in line_boxes.iter().enumerate() {
            let (boxes, synth) = word_stage(&binary, bounds, &profile.word_params)
                .map_err(|e| e.in_stage("word segmentation"))?;
            words.extend(boxes.into_iter().map(|b| SegmentBox {
                kind: SegmentKind::Word,
                bounds: b,
                parent: Some(index),
            }));
            if collect_artifacts {
                for r in 0..synth.height() {
                    for c in 0..synth.width() {
                        if synth.get(r, c) {
                            word_hough.set(bounds.row_start + r, bounds.col_start + c, true);
                        }
                    }
                }
            }
        }
        lines = line_boxes
            .into_iter()
            .map(|bounds| SegmentBox {
                kind: SegmentKind::Line,
                bounds,
                parent: None,
            })
            .collect();
    }

    if profile.plate_filter.is_some() {
        words = plate_filter(
            &words,
            profile.plate_filter.as_ref(),
            binary.width(),
            binary.height(),
        );
    }

    let artifacts = collect_artifacts.then_some(StageArtifacts {
        gray,
        skew,
        binary,
        edges,
        line_accumulator,
        line_hough,
        word_hough,
    });

    Ok(SegmentationResult {
        image_id: image_id.to_string(),
        profile_name: profile.name.clone(),
        lines,
        words,
        artifacts,
    })
}
