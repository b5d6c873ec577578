//! Grayscale rasters, bilinear point sampling and summed-area tables.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Row-major 8-bit grayscale raster with a top-left origin.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    /// Wraps a row-major buffer. Both sides must be at least one pixel and
    /// `data.len()` must equal `width * height`.
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || width.checked_mul(height) != Some(data.len()) {
            return Err(Error::InvalidImage { width, height, len: data.len() });
        }
        Ok(GrayImage { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        let len = width
            .checked_mul(height)
            .ok_or(Error::InvalidImage { width, height, len: 0 })?;
        Self::new(width, height, vec![value; len])
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let mut data = Vec::with_capacity(width.saturating_mul(height));
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    /// Pixel at `(x, y)`. Panics when out of range, like slice indexing.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        assert!(x < self.width && y < self.height, "pixel ({x}, {y}) outside {}x{}", self.width, self.height);
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn get_checked(&self, x: usize, y: usize) -> Option<u8> {
        (x < self.width && y < self.height).then(|| self.data[y * self.width + x])
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        assert!(x < self.width && y < self.height, "pixel ({x}, {y}) outside {}x{}", self.width, self.height);
        self.data[y * self.width + x] = value;
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[u8] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    /// Applies a per-intensity lookup to every pixel.
    pub fn map_values(&self, mut f: impl FnMut(u8) -> u8) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Copies out the `width × height` rectangle whose top-left corner is `(x, y)`.
    pub fn crop(&self, x: usize, y: usize, width: usize, height: usize) -> Result<GrayImage> {
        if width == 0 || height == 0 || x + width > self.width || y + height > self.height {
            return Err(Error::OutOfBounds(format!(
                "crop {width}x{height}+{x}+{y} of {}x{} image",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(width * height);
        for row in y..y + height {
            data.extend_from_slice(&self.row(row)[x..x + width]);
        }
        Ok(GrayImage { width, height, data })
    }

    /// Overwrites pixels with `patch`, top-left corner at `(x, y)`. The patch must fit.
    pub fn paste(&mut self, patch: &GrayImage, x: usize, y: usize) -> Result<()> {
        if x + patch.width > self.width || y + patch.height > self.height {
            return Err(Error::OutOfBounds(format!(
                "paste {}x{}+{x}+{y} into {}x{} image",
                patch.width, patch.height, self.width, self.height
            )));
        }
        for row in 0..patch.height {
            let dst = (y + row) * self.width + x;
            self.data[dst..dst + patch.width].copy_from_slice(patch.row(row));
        }
        Ok(())
    }

    /// Bilinear blend of the four grid pixels surrounding `(x, y)`.
    ///
    /// Integer coordinates return the pixel value exactly, and a region of
    /// equal pixels always yields that value exactly (the blend is written as
    /// two nested lerps, never as a sum of four weights).
    pub fn bilinear_sample(&self, x: f64, y: f64) -> Result<f64> {
        let max_x = (self.width - 1) as f64;
        let max_y = (self.height - 1) as f64;
        // NaN fails both comparisons.
        if !(x >= 0.0 && x <= max_x && y >= 0.0 && y <= max_y) {
            return Err(Error::OutOfBounds(format!(
                "sample ({x}, {y}) outside [0, {max_x}] x [0, {max_y}]"
            )));
        }
        let x0 = x as usize;
        let y0 = y as usize;
        let fx = x - x0 as f64;
        let fy = y - y0 as f64;
        Ok(self.blend(x0, y0, fx, fy))
    }

    #[inline]
    pub(crate) fn blend(&self, x0: usize, y0: usize, fx: f64, fy: f64) -> f64 {
        lerp2(&self.data, self.width, y0 * self.width + x0, fx, fy)
    }
}

/// Lerp-form bilinear blend at flat index `base` of a row-major buffer with
/// row stride `stride` and fractional offsets in `[0, 1)`. Neighbours at `+1`
/// are only read when the matching fraction is non-zero.
#[inline(always)]
pub(crate) fn lerp2(data: &[u8], stride: usize, base: usize, fx: f64, fy: f64) -> f64 {
    let lerp_row = |i: usize| {
        let a = data[i] as f64;
        if fx == 0.0 {
            a
        } else {
            a + fx * (data[i + 1] as f64 - a)
        }
    };
    let top = lerp_row(base);
    if fy == 0.0 {
        top
    } else {
        let bottom = lerp_row(base + stride);
        top + fy * (bottom - top)
    }
}

/// Inclusive summed-area table: `value(x, y)` is the sum of every source
/// pixel `(i, j)` with `i <= x` and `j <= y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralImage {
    width: usize,
    height: usize,
    data: Vec<u64>,
}

impl IntegralImage {
    pub fn new(img: &GrayImage) -> Self {
        let (width, height) = (img.width, img.height);
        let mut data = vec![0u64; width * height];
        for y in 0..height {
            let mut row_sum = 0u64;
            for x in 0..width {
                row_sum += img.data[y * width + x] as u64;
                let above = if y > 0 { data[(y - 1) * width + x] } else { 0 };
                data[y * width + x] = row_sum + above;
            }
        }
        IntegralImage { width, height, data }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn data(&self) -> &[u64] {
        &self.data
    }

    #[inline]
    pub fn value(&self, x: usize, y: usize) -> u64 {
        self.data[y * self.width + x]
    }

    /// Sum over the inclusive rectangle `[x0, x1] × [y0, y1]` by the
    /// four-corner identity.
    pub fn region_sum(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> Result<u64> {
        if x0 > x1 || y0 > y1 || x1 >= self.width || y1 >= self.height {
            return Err(Error::OutOfBounds(format!(
                "rectangle ({x0}, {y0})-({x1}, {y1}) in {}x{} table",
                self.width, self.height
            )));
        }
        // add the top-left corner first so no intermediate goes negative
        let mut sum = self.value(x1, y1);
        if x0 > 0 && y0 > 0 {
            sum += self.value(x0 - 1, y0 - 1);
        }
        if x0 > 0 {
            sum -= self.value(x0 - 1, y1);
        }
        if y0 > 0 {
            sum -= self.value(x1, y0 - 1);
        }
        Ok(sum)
    }
}

/// Shorthand for [`IntegralImage::new`].
pub fn integral_image(img: &GrayImage) -> IntegralImage {
    IntegralImage::new(img)
}
