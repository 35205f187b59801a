//! Flat CSV interchange for segment boxes. Predictions and ground truth
//! share one schema so the evaluator can read either side:
//!
//! ```csv
//! image_id,kind,parent,row_start,col_start,row_end,col_end
//! page-000,line,,20,20,27,239
//! page-000,word,0,20,20,27,54
//! ```
//!
//! `kind` is `line` or `word`; `parent` is the 0-based index of a word's
//! line within the same file's line records, empty when there is none.
//! Coordinates are inclusive pixel bounds.

use std::fs;
use std::path::Path;

use crate::ccl::BoundingBox;
use crate::error::{Error, Result};
use crate::pipeline::{SegmentBox, SegmentKind, SegmentationResult};

pub const BOX_CSV_HEADER: &str = "image_id,kind,parent,row_start,col_start,row_end,col_end";

/// One CSV row: a segment box tagged with its source image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxRecord {
    pub image_id: String,
    pub kind: SegmentKind,
    pub parent: Option<usize>,
    pub bounds: BoundingBox,
}

impl BoxRecord {
    pub fn new(image_id: &str, segment: &SegmentBox) -> BoxRecord {
        BoxRecord {
            image_id: image_id.to_string(),
            kind: segment.kind,
            parent: segment.parent,
            bounds: segment.bounds,
        }
    }
}

/// Flattens a result to records: all lines first (in index order, so
/// `parent` references hold), then all words.
pub fn result_records(result: &SegmentationResult) -> Vec<BoxRecord> {
    result
        .lines
        .iter()
        .chain(result.words.iter())
        .map(|s| BoxRecord::new(&result.image_id, s))
        .collect()
}

pub fn boxes_to_csv(records: &[BoxRecord]) -> String {
    let mut out = String::from(BOX_CSV_HEADER);
    out.push('\n');
    for r in records {
        debug_assert!(
            !r.image_id.contains([',', '\n', '\r']),
            "image id {:?} would corrupt the CSV",
            r.image_id
        );
        let parent = r.parent.map(|p| p.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.image_id,
            r.kind.as_str(),
            parent,
            r.bounds.row_start,
            r.bounds.col_start,
            r.bounds.row_end,
            r.bounds.col_end,
        ));
    }
    out
}

/// Parses box CSV, reporting malformed content with its line number
/// (1-based; line 1 is the header).
pub fn parse_box_csv(text: &str) -> Result<Vec<BoxRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first.trim_end_matches('\r') == BOX_CSV_HEADER => {}
        Some((_, first)) => {
            return Err(Error::ParseRecord {
                line: 1,
                reason: format!("expected header {BOX_CSV_HEADER:?}, got {first:?}"),
            })
        }
        None => {
            return Err(Error::ParseRecord {
                line: 1,
                reason: "empty file, expected a header".to_string(),
            })
        }
    }

    let mut records = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            return Err(Error::ParseRecord {
                line: line_no,
                reason: "blank line in record body".to_string(),
            });
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::ParseRecord {
                line: line_no,
                reason: format!("expected 7 fields, got {}", fields.len()),
            });
        }
        let kind = match fields[1] {
            "line" => SegmentKind::Line,
            "word" => SegmentKind::Word,
            other => {
                return Err(Error::ParseRecord {
                    line: line_no,
                    reason: format!("kind must be `line` or `word`, got {other:?}"),
                })
            }
        };
        let parent = if fields[2].is_empty() {
            None
        } else {
            Some(fields[2].parse::<usize>().map_err(|_| Error::ParseRecord {
                line: line_no,
                reason: format!("cannot parse parent index {:?}", fields[2]),
            })?)
        };
        let coord = |i: usize, name: &str| {
            fields[i].parse::<u32>().map_err(|_| Error::ParseRecord {
                line: line_no,
                reason: format!("cannot parse {name} {:?}", fields[i]),
            })
        };
        let row_start = coord(3, "row_start")?;
        let col_start = coord(4, "col_start")?;
        let row_end = coord(5, "row_end")?;
        let col_end = coord(6, "col_end")?;
        if row_start > row_end || col_start > col_end {
            return Err(Error::ParseRecord {
                line: line_no,
                reason: format!("inverted box ({row_start},{col_start})..({row_end},{col_end})"),
            });
        }
        records.push(BoxRecord {
            image_id: fields[0].to_string(),
            kind,
            parent,
            bounds: BoundingBox::new(row_start, col_start, row_end, col_end),
        });
    }
    Ok(records)
}

pub fn write_box_csv(path: impl AsRef<Path>, records: &[BoxRecord]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, boxes_to_csv(records)).map_err(|source| Error::UnwritableFile {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_box_csv(path: impl AsRef<Path>) -> Result<Vec<BoxRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::UnreadableFile {
        path: path.to_path_buf(),
        source,
    })?;
    parse_box_csv(&text)
}
