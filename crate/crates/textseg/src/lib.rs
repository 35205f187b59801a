//! Text line and word segmentation for raster images.
//!
//! The pipeline binarizes a grayscale image, extracts Sobel edges,
//! votes edge pixels into a (ρ, θ) accumulator, copies the supporters
//! of well-supported near-horizontal lines back into an image while
//! bridging small gaps along each line, and reads text units off that
//! image with 4-connected component labeling. Run hierarchically —
//! lines first over the edge map, then words inside each line over the
//! text binarization — it yields nested line and word boxes.
//!
//! Entry points: [`pipeline::run_pipeline`] for whole images,
//! [`pipeline::segment_lines`] / [`pipeline::segment_words`] for the
//! individual stages, [`eval::generate_page`] and [`eval::evaluate`]
//! for synthetic benchmarking.

pub mod binarize;
pub mod ccl;
pub mod edges;
pub mod error;
pub mod eval;
pub mod hough;
pub mod imaging;
pub mod pipeline;
pub mod records;
pub mod render;

pub use ccl::BoundingBox;
pub use error::{Error, Result};
pub use pipeline::{run_pipeline, DomainProfile, SegmentBox, SegmentKind, SegmentationResult};
