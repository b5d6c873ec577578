//! Throughput of the label-map operator.

use std::hint::black_box;
use std::time::Instant;

use lbpx_core::{GrayImage, LbpOperator, LbpParams};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::files::ParamsJson;
use crate::parallel::{par_lbp_map, thread_pool};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub fps: f64,
    pub ms_per_frame: f64,
    pub iterations: usize,
    pub threads: usize,
    pub width: usize,
    pub height: usize,
    pub params: ParamsJson,
}

/// Times `iterations` label-map computations of `img`.
///
/// The operator (sampling taps and mapping table) is prepared once; every
/// iteration allocates and fills a fresh map. `threads == 1` runs the plain
/// serial loop; more threads use row-parallel maps on a dedicated pool.
pub fn benchmark_fps(img: &GrayImage, params: &LbpParams, iterations: usize, threads: usize) -> Result<BenchReport> {
    let iterations = iterations.max(1);
    let threads = threads.max(1);
    let op = LbpOperator::new(*params)?;
    // surface size errors before timing
    op.map_dims(img)?;
    let elapsed = if threads == 1 {
        let start = Instant::now();
        for _ in 0..iterations {
            black_box(op.map(black_box(img))?);
        }
        start.elapsed()
    } else {
        let pool = thread_pool(threads);
        pool.install(|| -> Result<_> {
            let start = Instant::now();
            for _ in 0..iterations {
                black_box(par_lbp_map(&op, black_box(img))?);
            }
            Ok(start.elapsed())
        })?
    };
    // guard against a zero reading on very coarse clocks
    let secs = elapsed.as_secs_f64().max(1e-9);
    let fps = iterations as f64 / secs;
    Ok(BenchReport {
        fps,
        ms_per_frame: 1000.0 / fps,
        iterations,
        threads,
        width: img.width(),
        height: img.height(),
        params: params.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use lbpx_core::MappingKind;

    #[test]
    fn report_is_consistent() {
        let img = GrayImage::from_fn(64, 48, |x, y| (x ^ y) as u8).unwrap();
        for threads in [1, 2] {
            let r = benchmark_fps(&img, &LbpParams::square3x3(MappingKind::Raw), 5, threads).unwrap();
            assert!(r.fps > 0.0);
            assert!((r.ms_per_frame - 1000.0 / r.fps).abs() < 1e-9);
            assert_eq!((r.iterations, r.threads, r.width, r.height), (5, threads, 64, 48));
        }
    }

    #[test]
    fn too_small_image_is_an_error() {
        let img = GrayImage::filled(2, 2, 0).unwrap();
        assert!(benchmark_fps(&img, &LbpParams::default(), 1, 1).is_err());
    }
}
