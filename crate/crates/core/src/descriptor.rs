//! Spatial grid histograms over label maps.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{param_err, Error, Result};
use crate::lbp::{LbpMap, LbpParams};

/// Label histogram of one map region.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bins: Vec<f64>,
}

impl Histogram {
    pub fn total(&self) -> f64 {
        self.bins.iter().sum()
    }
}

/// Counts labels inside the inclusive map rectangle `[x0, x1] × [y0, y1]`.
/// With `normalize`, counts are divided by the region's pixel count.
pub fn region_histogram(
    map: &LbpMap,
    x0: usize,
    y0: usize,
    x1: usize,
    y1: usize,
    bin_count: usize,
    normalize: bool,
) -> Result<Histogram> {
    if x0 > x1 || y0 > y1 || x1 >= map.width() || y1 >= map.height() {
        return Err(Error::OutOfBounds(format!(
            "region ({x0}, {y0})-({x1}, {y1}) in {}x{} map",
            map.width(),
            map.height()
        )));
    }
    let mut bins = vec![0f64; bin_count];
    accumulate(map, x0, y0, x1 + 1, y1 + 1, &mut bins)?;
    if normalize {
        let area = ((x1 - x0 + 1) * (y1 - y0 + 1)) as f64;
        bins.iter_mut().for_each(|b| *b /= area);
    }
    Ok(Histogram { bins })
}

/// Adds label counts of the half-open rectangle to `bins`.
fn accumulate(map: &LbpMap, x0: usize, y0: usize, x_end: usize, y_end: usize, bins: &mut [f64]) -> Result<()> {
    for y in y0..y_end {
        for &label in &map.row(y)[x0..x_end] {
            match bins.get_mut(label as usize) {
                Some(b) => *b += 1.0,
                None => return Err(Error::CorruptMap { label, bin_count: bins.len() }),
            }
        }
    }
    Ok(())
}

/// `[start, end)` spans of `n` cells over `len` pixels; the last cell takes
/// the remainder.
pub fn cell_spans(len: usize, n: usize) -> Vec<(usize, usize)> {
    let base = len / n;
    (0..n)
        .map(|i| {
            let start = i * base;
            let end = if i + 1 == n { len } else { start + base };
            (start, end)
        })
        .collect()
}

/// Concatenated per-cell, L1-normalised label histograms.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDescriptor {
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub params: LbpParams,
    pub values: Vec<f64>,
    pub region_weights: Option<Vec<f64>>,
}

impl GridDescriptor {
    /// Validates shape against `params` and the grid size.
    pub fn new(grid_rows: usize, grid_cols: usize, params: LbpParams, values: Vec<f64>) -> Result<Self> {
        let want = grid_rows * grid_cols * params.label_count();
        if grid_rows == 0 || grid_cols == 0 || values.len() != want {
            return Err(param_err!(
                "descriptor {grid_rows}x{grid_cols} with {} label bins needs {want} values, got {}",
                params.label_count(),
                values.len()
            ));
        }
        Ok(GridDescriptor { grid_rows, grid_cols, params, values, region_weights: None })
    }

    #[inline]
    pub fn bin_count(&self) -> usize {
        self.params.label_count()
    }

    #[inline]
    pub fn region_count(&self) -> usize {
        self.grid_rows * self.grid_cols
    }

    /// Histogram slice of region `index` in row-major region order.
    pub fn region(&self, index: usize) -> &[f64] {
        let b = self.bin_count();
        &self.values[index * b..(index + 1) * b]
    }

    pub fn regions(&self) -> core::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.bin_count())
    }

    /// Same LBP configuration and grid as `other`.
    pub fn same_config(&self, other: &GridDescriptor) -> bool {
        self.params == other.params
            && self.grid_rows == other.grid_rows
            && self.grid_cols == other.grid_cols
            && self.values.len() == other.values.len()
    }
}

/// Grid descriptor of the whole map.
pub fn grid_descriptor(map: &LbpMap, grid_rows: usize, grid_cols: usize) -> Result<GridDescriptor> {
    grid_descriptor_window(map, 0, 0, map.width(), map.height(), grid_rows, grid_cols)
}

/// Grid descriptor of the `width × height` map window at `(x, y)`.
///
/// Windowing a whole-image map gives the same descriptor as mapping the
/// cropped image, since every label depends only on its own neighbourhood.
pub fn grid_descriptor_window(
    map: &LbpMap,
    x: usize,
    y: usize,
    width: usize,
    height: usize,
    grid_rows: usize,
    grid_cols: usize,
) -> Result<GridDescriptor> {
    if width == 0 || height == 0 || x + width > map.width() || y + height > map.height() {
        return Err(Error::OutOfBounds(format!(
            "window {width}x{height}+{x}+{y} in {}x{} map",
            map.width(),
            map.height()
        )));
    }
    if grid_rows == 0 || grid_cols == 0 || grid_rows > height || grid_cols > width {
        return Err(param_err!("grid {grid_rows}x{grid_cols} does not fit a {width}x{height} map"));
    }
    let bin_count = map.label_count();
    let mut values = vec![0f64; grid_rows * grid_cols * bin_count];
    let rows = cell_spans(height, grid_rows);
    let cols = cell_spans(width, grid_cols);
    let mut cells = values.chunks_exact_mut(bin_count);
    for &(r0, r1) in &rows {
        for &(c0, c1) in &cols {
            let bins = cells.next().expect("one slice per cell");
            accumulate(map, x + c0, y + r0, x + c1, y + r1, bins)?;
            let area = ((r1 - r0) * (c1 - c0)) as f64;
            bins.iter_mut().for_each(|b| *b /= area);
        }
    }
    Ok(GridDescriptor { grid_rows, grid_cols, params: *map.params(), values, region_weights: None })
}
