//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by segmentation, image I/O and evaluation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}")]
    UnreadableFile {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}")]
    UnwritableFile {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("corrupt BMP header: {0}")]
    CorruptHeader(String),

    #[error("unsupported BMP variant: {0}")]
    UnsupportedBmp(String),

    #[error("invalid image dimensions {width}x{height}")]
    InvalidDimensions { width: u32, height: u32 },

    #[error("pixel buffer holds {got} entries, expected {expected}")]
    PixelCountMismatch { expected: usize, got: usize },

    #[error("rotation angle {0}° outside the supported range of ±45°")]
    AngleOutOfRange(f64),

    #[error("image is {width}x{height}, but at least {min}x{min} is required")]
    ImageTooSmall { width: u32, height: u32, min: u32 },

    #[error("histogram is empty")]
    EmptyHistogram,

    #[error("invalid Hough parameters: {0}")]
    InvalidHoughParams(String),

    #[error("segment box lies outside the image bounds")]
    BoxOutOfBounds,

    #[error("crop region has zero area")]
    ZeroAreaCrop,

    #[error("invalid plate filter configuration: {0}")]
    InvalidPlateFilter(String),

    #[error("invalid page layout: {0}")]
    InvalidLayout(String),

    #[error("page layout does not fit the canvas: {0}")]
    LayoutOverflow(String),

    #[error("image id mismatch: predictions are for {predicted}, ground truth for {truth}")]
    ImageIdMismatch { predicted: String, truth: String },

    #[error("line {line}: {reason}")]
    ParseRecord { line: usize, reason: String },

    #[error("profile file line {line}: {reason}")]
    ParseProfile { line: usize, reason: String },

    #[error("{stage} stage failed")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps an error with the name of the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
