//! Std companion to `lbpx-core`: file formats, evaluation, benchmarking and
//! the `lbpx` command-line tool.

pub mod bench;
pub mod cli;
mod error;
pub mod eval;
pub mod files;
pub mod manifest;
pub mod parallel;
pub mod pgm;

pub use crate::error::{Error, Result};
pub use lbpx_core as core;
