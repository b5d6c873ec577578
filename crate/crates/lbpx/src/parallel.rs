//! Thread-pool setup and row-parallel label maps.

use lbpx_core::{GrayImage, LbpMap, LbpOperator};
use rayon::prelude::*;

use crate::error::Result;

/// Environment variable capping internal parallelism.
pub const THREADS_ENV: &str = "LBPX_THREADS";

/// Worker count: `requested` (or all cores when `None`), capped by
/// `LBPX_THREADS` when that is set to a positive integer.
pub fn thread_count(requested: Option<usize>) -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    let wanted = requested.unwrap_or(available).max(1);
    match std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(cap) if cap > 0 => wanted.min(cap),
        _ => wanted,
    }
}

pub fn thread_pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("rayon thread pool")
}

/// Same labels as [`LbpOperator::map`], computed in row bands on the current
/// rayon pool.
pub fn par_lbp_map(op: &LbpOperator, img: &GrayImage) -> Result<LbpMap> {
    let (width, height) = op.map_dims(img)?;
    let mut labels = vec![0u32; width * height];
    const BAND: usize = 16;
    labels
        .par_chunks_mut(width * BAND)
        .enumerate()
        .for_each(|(band, out)| op.encode_rows(img, band * BAND, out));
    Ok(LbpMap::from_labels(*op.params(), width, height, labels)?)
}
