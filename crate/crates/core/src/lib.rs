//! Local binary pattern texture features without `std`.
//!
//! Everything in this crate is a pure function over in-memory rasters:
//!
//! - [`image`]: 8-bit grayscale rasters, bilinear point sampling, summed-area tables.
//! - [`lbp`]: the 3×3 and circular (P, R) operators and whole-image label maps.
//! - [`mapping`]: uniform / rotation-invariant label compaction tables.
//! - [`descriptor`]: per-cell label histograms concatenated over a grid.
//! - [`classify`]: histogram distances and nearest-template classification.
//! - [`detect`]: sliding-window template search and non-maximum suppression.
//!
//! File formats, the CLI and anything that touches a clock or a thread pool
//! live in the `lbpx` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod classify;
pub mod descriptor;
pub mod detect;
mod error;
pub mod image;
pub mod lbp;
pub mod mapping;

pub use crate::classify::{build_templates, distance, ClassTemplate, Metric, Model, Prediction, MODEL_FORMAT_VERSION};
pub use crate::descriptor::{grid_descriptor, grid_descriptor_window, region_histogram, GridDescriptor, Histogram};
pub use crate::detect::{iou, nms, scan_detect, Detection};
pub use crate::error::{Error, Result};
pub use crate::image::{integral_image, GrayImage, IntegralImage};
pub use crate::lbp::{circular_offsets, lbp_code_3x3, lbp_code_circular, lbp_map, LbpMap, LbpOperator, LbpParams, Sampling};
pub use crate::mapping::{uniformity, MappingKind, MappingTable};
