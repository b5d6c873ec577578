//! The LBP operators: the basic 3×3 code and the circular (P, R) code.
//!
//! Both operators threshold each neighbour against the centre pixel with
//! `neighbour >= centre` (a zero difference sets the bit) and merge the bits
//! in sampling order, first sample in the most significant position. Sampling
//! starts at the top-left neighbour and proceeds clockwise on screen:
//!
//! ```text
//! 0 1 2
//! 7 c 3
//! 6 5 4
//! ```
//!
//! The circular operator places sample `p` at angle `-3π/4 + 2πp/P` (y axis
//! pointing down) and reads it by bilinear interpolation. With `P = 8,
//! R = √2` the four diagonal samples land on the 3×3 corners, while the axis
//! samples sit at distance √2 and need a two-pixel border.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use crate::error::{param_err, Error, Result};
use crate::image::{lerp2, GrayImage};
use crate::mapping::{check_neighbors, label_count, MappingKind, MappingTable};

/// Offsets closer than this to an integer are snapped onto the lattice, so
/// that e.g. `√2·cos(-3π/4)` reads the pixel at `-1` instead of blending in a
/// `1e-16` sliver of its neighbour.
const LATTICE_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sampling {
    Square3x3,
    Circular,
}

impl Sampling {
    pub fn as_str(self) -> &'static str {
        match self {
            Sampling::Square3x3 => "square3x3",
            Sampling::Circular => "circular",
        }
    }
}

impl fmt::Display for Sampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square3x3" => Ok(Sampling::Square3x3),
            "circular" => Ok(Sampling::Circular),
            other => Err(param_err!("unknown sampling {other:?} (expected square3x3 or circular)")),
        }
    }
}

/// A complete LBP configuration.
///
/// `Square3x3` requires eight neighbours; its radius is normalised to `1.0`
/// and otherwise ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbpParams {
    neighbors: u32,
    radius: f64,
    sampling: Sampling,
    mapping: MappingKind,
}

impl LbpParams {
    pub fn new(neighbors: u32, radius: f64, sampling: Sampling, mapping: MappingKind) -> Result<Self> {
        check_neighbors(neighbors)?;
        match sampling {
            Sampling::Square3x3 => {
                if neighbors != 8 {
                    return Err(param_err!("square3x3 sampling needs 8 neighbors, got {neighbors}"));
                }
                Ok(LbpParams { neighbors, radius: 1.0, sampling, mapping })
            }
            Sampling::Circular => {
                if !(radius.is_finite() && radius > 0.0) {
                    return Err(param_err!("radius must be finite and > 0, got {radius}"));
                }
                Ok(LbpParams { neighbors, radius, sampling, mapping })
            }
        }
    }

    pub fn square3x3(mapping: MappingKind) -> Self {
        LbpParams { neighbors: 8, radius: 1.0, sampling: Sampling::Square3x3, mapping }
    }

    pub fn circular(neighbors: u32, radius: f64, mapping: MappingKind) -> Result<Self> {
        Self::new(neighbors, radius, Sampling::Circular, mapping)
    }

    #[inline]
    pub fn neighbors(&self) -> u32 {
        self.neighbors
    }

    #[inline]
    pub fn radius(&self) -> f64 {
        self.radius
    }

    #[inline]
    pub fn sampling(&self) -> Sampling {
        self.sampling
    }

    #[inline]
    pub fn mapping(&self) -> MappingKind {
        self.mapping
    }

    /// Distance from the image border to the first labelled pixel.
    pub fn origin_offset(&self) -> usize {
        match self.sampling {
            Sampling::Square3x3 => 1,
            Sampling::Circular => libm::ceil(self.radius) as usize,
        }
    }

    pub fn label_count(&self) -> usize {
        label_count(self.mapping, self.neighbors)
    }
}

impl Default for LbpParams {
    fn default() -> Self {
        LbpParams::square3x3(MappingKind::U2)
    }
}

/// Clockwise-from-top-left order of the 3×3 neighbours as `(dx, dy)`.
pub const SQUARE_OFFSETS: [(isize, isize); 8] =
    [(-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0)];

/// Basic LBP code of a 3×3 patch given as `patch[row][col]`.
pub fn lbp_code_3x3(patch: &[[u8; 3]; 3]) -> u8 {
    let center = patch[1][1];
    SQUARE_OFFSETS.iter().fold(0u8, |code, &(dx, dy)| {
        let v = patch[(1 + dy) as usize][(1 + dx) as usize];
        (code << 1) | (v >= center) as u8
    })
}

fn snap(v: f64) -> f64 {
    let r = libm::round(v);
    if libm::fabs(v - r) < LATTICE_SNAP {
        r
    } else {
        v
    }
}

/// Sampling offsets `(dx, dy)` of `neighbors` points evenly spaced on a circle
/// of radius `radius`, starting top-left and running clockwise on screen.
pub fn circular_offsets(neighbors: u32, radius: f64) -> Result<Vec<(f64, f64)>> {
    check_neighbors(neighbors)?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(param_err!("radius must be finite and > 0, got {radius}"));
    }
    let step = 2.0 * PI / neighbors as f64;
    Ok((0..neighbors)
        .map(|p| {
            let angle = -0.75 * PI + step * p as f64;
            (snap(radius * libm::cos(angle)), snap(radius * libm::sin(angle)))
        })
        .collect())
}

/// One bilinear sample relative to the centre pixel.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Tap {
    dx: isize,
    dy: isize,
    fx: f64,
    fy: f64,
}

impl Tap {
    fn new(dx: f64, dy: f64) -> Self {
        let bx = libm::floor(dx);
        let by = libm::floor(dy);
        Tap { dx: bx as isize, dy: by as isize, fx: dx - bx, fy: dy - by }
    }
}

/// A prepared LBP configuration: sampling taps and mapping table, built once
/// and reused across images.
#[derive(Debug, Clone)]
pub struct LbpOperator {
    params: LbpParams,
    taps: Vec<Tap>,
    table: MappingTable,
}

impl LbpOperator {
    pub fn new(params: LbpParams) -> Result<Self> {
        let taps = match params.sampling {
            Sampling::Square3x3 => SQUARE_OFFSETS
                .iter()
                .map(|&(dx, dy)| Tap { dx, dy, fx: 0.0, fy: 0.0 })
                .collect(),
            Sampling::Circular => circular_offsets(params.neighbors, params.radius)?
                .into_iter()
                .map(|(dx, dy)| Tap::new(dx, dy))
                .collect(),
        };
        let table = MappingTable::build(params.neighbors, params.mapping)?;
        Ok(LbpOperator { params, taps, table })
    }

    #[inline]
    pub fn params(&self) -> &LbpParams {
        &self.params
    }

    #[inline]
    pub fn table(&self) -> &MappingTable {
        &self.table
    }

    /// Label map dimensions for `img`, or `ImageTooSmall`.
    pub fn map_dims(&self, img: &GrayImage) -> Result<(usize, usize)> {
        let off = self.params.origin_offset();
        let min = 2 * off + 1;
        if img.width() < min || img.height() < min {
            return Err(Error::ImageTooSmall { width: img.width(), height: img.height(), min });
        }
        Ok((img.width() - 2 * off, img.height() - 2 * off))
    }

    /// Raw (unmapped) code at source pixel `(cx, cy)`.
    pub fn code_at(&self, img: &GrayImage, cx: usize, cy: usize) -> Result<u32> {
        let off = self.params.origin_offset();
        if cx < off || cy < off || cx + off >= img.width() || cy + off >= img.height() {
            return Err(Error::OutOfBounds(format!(
                "centre ({cx}, {cy}) closer than {off} to the border of a {}x{} image",
                img.width(),
                img.height()
            )));
        }
        Ok(self.raw_code(img.data(), img.width(), cy * img.width() + cx))
    }

    #[inline(always)]
    fn raw_code(&self, data: &[u8], stride: usize, centre: usize) -> u32 {
        let c = data[centre] as f64;
        self.taps.iter().fold(0u32, |code, t| {
            let base = (centre as isize + t.dy * stride as isize + t.dx) as usize;
            let v = lerp2(data, stride, base, t.fx, t.fy);
            (code << 1) | (v >= c) as u32
        })
    }

    /// Writes mapped labels for map rows `first_row..` into `out`, whose
    /// length must be a whole number of map rows. `img` must already have
    /// passed [`map_dims`](Self::map_dims).
    pub fn encode_rows(&self, img: &GrayImage, first_row: usize, out: &mut [u32]) {
        let off = self.params.origin_offset();
        let stride = img.width();
        let map_w = stride - 2 * off;
        let data = img.data();
        let square = self.params.sampling == Sampling::Square3x3;
        let table = self.table.as_slice();
        for (r, row_out) in out.chunks_exact_mut(map_w).enumerate() {
            let cy = first_row + r + off;
            if square {
                let up = &data[(cy - 1) * stride..cy * stride];
                let mid = &data[cy * stride..(cy + 1) * stride];
                let down = &data[(cy + 1) * stride..(cy + 2) * stride];
                for (i, slot) in row_out.iter_mut().enumerate() {
                    let x = i + 1;
                    let c = mid[x];
                    let code = ((up[x - 1] >= c) as u32) << 7
                        | ((up[x] >= c) as u32) << 6
                        | ((up[x + 1] >= c) as u32) << 5
                        | ((mid[x + 1] >= c) as u32) << 4
                        | ((down[x + 1] >= c) as u32) << 3
                        | ((down[x] >= c) as u32) << 2
                        | ((down[x - 1] >= c) as u32) << 1
                        | ((mid[x - 1] >= c) as u32);
                    *slot = match table {
                        Some(t) => t[code as usize],
                        None => code,
                    };
                }
            } else {
                for (i, slot) in row_out.iter_mut().enumerate() {
                    let code = self.raw_code(data, stride, cy * stride + i + off);
                    *slot = match table {
                        Some(t) => t[code as usize],
                        None => code,
                    };
                }
            }
        }
    }

    /// Labels every pixel whose whole neighbourhood lies inside `img`.
    pub fn map(&self, img: &GrayImage) -> Result<LbpMap> {
        let (width, height) = self.map_dims(img)?;
        let mut labels = vec![0u32; width * height];
        self.encode_rows(img, 0, &mut labels);
        Ok(LbpMap { params: self.params, origin_offset: self.params.origin_offset(), width, height, labels })
    }
}

/// Raw circular code at `(cx, cy)`.
pub fn lbp_code_circular(img: &GrayImage, cx: usize, cy: usize, params: &LbpParams) -> Result<u32> {
    let circular = LbpParams { sampling: Sampling::Circular, mapping: MappingKind::Raw, ..*params };
    let taps: Vec<Tap> = circular_offsets(circular.neighbors, circular.radius)?
        .into_iter()
        .map(|(dx, dy)| Tap::new(dx, dy))
        .collect();
    let op = LbpOperator { params: circular, taps, table: MappingTable::build(circular.neighbors, MappingKind::Raw)? };
    op.code_at(img, cx, cy)
}

pub fn lbp_map(img: &GrayImage, params: &LbpParams) -> Result<LbpMap> {
    LbpOperator::new(*params)?.map(img)
}

/// Per-pixel labels over the valid interior of a source image.
///
/// Map pixel `(x, y)` corresponds to source pixel
/// `(x + origin_offset, y + origin_offset)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LbpMap {
    params: LbpParams,
    origin_offset: usize,
    width: usize,
    height: usize,
    labels: Vec<u32>,
}

impl LbpMap {
    /// Assembles a map from raw parts. Only the shape is checked; labels
    /// outside the mapping's range are reported later by histogramming.
    pub fn from_labels(params: LbpParams, width: usize, height: usize, labels: Vec<u32>) -> Result<Self> {
        if width == 0 || height == 0 || width.checked_mul(height) != Some(labels.len()) {
            return Err(param_err!("label map {width}x{height} with {} labels", labels.len()));
        }
        Ok(LbpMap { params, origin_offset: params.origin_offset(), width, height, labels })
    }

    #[inline]
    pub fn params(&self) -> &LbpParams {
        &self.params
    }

    #[inline]
    pub fn origin_offset(&self) -> usize {
        self.origin_offset
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
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        assert!(x < self.width && y < self.height);
        self.labels[y * self.width + x]
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[u32] {
        &self.labels[y * self.width..(y + 1) * self.width]
    }

    pub fn label_count(&self) -> usize {
        self.params.label_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SQRT_2: f64 = core::f64::consts::SQRT_2;

    fn patch_image(p: &[[u8; 3]; 3]) -> GrayImage {
        GrayImage::from_fn(3, 3, |x, y| p[y][x]).unwrap()
    }

    #[test]
    fn code_3x3_examples() {
        assert_eq!(lbp_code_3x3(&[[4; 3]; 3]), 255);
        assert_eq!(lbp_code_3x3(&[[1, 2, 3], [4, 9, 5], [6, 7, 8]]), 0);
        // TL,T,TR,R,BR,B,BL,L = 6,4,7,5,3,9,2,5 around 5 → 1011_0101
        assert_eq!(lbp_code_3x3(&[[6, 4, 7], [5, 5, 5], [2, 9, 3]]), 181);
    }

    #[test]
    fn offsets_p8_sqrt2() {
        let offs = circular_offsets(8, SQRT_2).unwrap();
        // diagonals land on the lattice; axis points stay on the circle at √2
        let expect = [
            (-1.0, -1.0),
            (0.0, -SQRT_2),
            (1.0, -1.0),
            (SQRT_2, 0.0),
            (1.0, 1.0),
            (0.0, SQRT_2),
            (-1.0, 1.0),
            (-SQRT_2, 0.0),
        ];
        assert_eq!(offs, expect);
    }

    /// 3×3 patch centred in a 5×5 image with edge replication: the axis
    /// samples at distance √2 blend a patch pixel with its own copy.
    fn replicate_embed(p: &[[u8; 3]; 3]) -> GrayImage {
        GrayImage::from_fn(5, 5, |x, y| p[y.clamp(1, 3) - 1][x.clamp(1, 3) - 1]).unwrap()
    }

    #[test]
    fn sqrt2_matches_3x3_on_replicated_border() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let params = LbpParams::circular(8, SQRT_2, MappingKind::Raw).unwrap();
        for _ in 0..1000 {
            let mut p = [[0u8; 3]; 3];
            p.iter_mut().flatten().for_each(|v| *v = rng.gen_range(0..8));
            let code = lbp_code_circular(&replicate_embed(&p), 2, 2, &params).unwrap();
            assert_eq!(code, lbp_code_3x3(&p) as u32, "{p:?}");
        }
    }

    #[test]
    fn sqrt2_needs_two_pixel_border() {
        let params = LbpParams::circular(8, SQRT_2, MappingKind::Raw).unwrap();
        assert_eq!(params.origin_offset(), 2);
        let im = patch_image(&[[6, 4, 7], [5, 5, 5], [2, 9, 3]]);
        assert!(matches!(lbp_code_circular(&im, 1, 1, &params), Err(Error::OutOfBounds(_))));
        assert_eq!(lbp_code_circular(&replicate_embed(&[[6, 4, 7], [5, 5, 5], [2, 9, 3]]), 2, 2, &params).unwrap(), 181);
    }

    #[test]
    fn offsets_p4_r1_diagonals() {
        let h = SQRT_2 / 2.0;
        let expect = [(-h, -h), (h, -h), (h, h), (-h, h)];
        for (got, want) in circular_offsets(4, 1.0).unwrap().iter().zip(expect) {
            assert!((got.0 - want.0).abs() < 1e-12 && (got.1 - want.1).abs() < 1e-12, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn offsets_lie_on_circle() {
        for p in [2u32, 3, 5, 8, 12, 16, 24] {
            for r in [0.5, 1.0, 1.5, 2.0, 3.25] {
                for (dx, dy) in circular_offsets(p, r).unwrap() {
                    assert!(((dx * dx + dy * dy).sqrt() - r).abs() < 1e-8);
                }
            }
        }
        assert!(circular_offsets(1, 1.0).is_err());
        assert!(circular_offsets(8, 0.0).is_err());
        assert!(circular_offsets(8, f64::NAN).is_err());
    }

    #[test]
    fn circular_examples() {
        // P=4, R=1: samples at the four diagonals, (±√2/2, ±√2/2)
        let params = LbpParams::circular(4, 1.0, MappingKind::Raw).unwrap();
        let im = patch_image(&[[6, 4, 7], [5, 5, 5], [2, 9, 3]]);
        let h = SQRT_2 / 2.0;
        let oracle = |x: f64, y: f64| im.bilinear_sample(x, y).unwrap();
        let bits = [oracle(1.0 - h, 1.0 - h), oracle(1.0 + h, 1.0 - h), oracle(1.0 + h, 1.0 + h), oracle(1.0 - h, 1.0 + h)]
            .map(|v| (v >= 5.0) as u32);
        let want = bits.iter().fold(0, |c, b| (c << 1) | b);
        assert_eq!(lbp_code_circular(&im, 1, 1, &params).unwrap(), want);

        let flat = GrayImage::filled(9, 9, 77).unwrap();
        for (p, r) in [(8u32, 1.0), (12, 2.5), (16, 3.0), (5, 0.7)] {
            let params = LbpParams::circular(p, r, MappingKind::Raw).unwrap();
            assert_eq!(lbp_code_circular(&flat, 4, 4, &params).unwrap(), (1 << p) - 1);
        }

        let mut peak = GrayImage::filled(5, 5, 10).unwrap();
        peak.set(2, 2, 200);
        let params = LbpParams::circular(12, 1.5, MappingKind::Raw).unwrap();
        assert_eq!(lbp_code_circular(&peak, 2, 2, &params).unwrap(), 0);

        assert!(matches!(lbp_code_circular(&peak, 1, 2, &params), Err(Error::OutOfBounds(_))));
    }

    #[test]
    fn taps_agree_with_bilinear_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let im = GrayImage::from_fn(15, 15, |_, _| rng.gen()).unwrap();
        for (p, r) in [(8u32, 1.0), (16, 2.0), (7, 3.3), (24, 5.0)] {
            let offs = circular_offsets(p, r).unwrap();
            let (cx, cy) = (7usize, 7usize);
            for &(dx, dy) in &offs {
                let t = Tap::new(dx, dy);
                let base = ((cy as isize + t.dy) * 15 + cx as isize + t.dx) as usize;
                let tap = lerp2(im.data(), 15, base, t.fx, t.fy);
                let direct = im.bilinear_sample(cx as f64 + dx, cy as f64 + dy).unwrap();
                assert!((tap - direct).abs() < 1e-9, "P={p} R={r}: {tap} vs {direct}");
            }
        }
    }

    #[test]
    fn params_validation() {
        assert!(LbpParams::new(12, 1.0, Sampling::Square3x3, MappingKind::Raw).is_err());
        assert!(LbpParams::circular(25, 1.0, MappingKind::Raw).is_err());
        assert!(LbpParams::circular(8, -1.0, MappingKind::Raw).is_err());
        let sq = LbpParams::new(8, 4.0, Sampling::Square3x3, MappingKind::U2).unwrap();
        assert_eq!(sq, LbpParams::square3x3(MappingKind::U2));
        assert_eq!(LbpParams::circular(8, 2.5, MappingKind::Raw).unwrap().origin_offset(), 3);
    }

    #[test]
    fn map_examples() {
        let flat = GrayImage::filled(5, 5, 3).unwrap();
        let m = lbp_map(&flat, &LbpParams::square3x3(MappingKind::Raw)).unwrap();
        assert_eq!((m.width(), m.height(), m.origin_offset()), (3, 3, 1));
        assert!(m.labels().iter().all(|&l| l == 255));

        let im = GrayImage::filled(17, 9, 0).unwrap();
        let m = lbp_map(&im, &LbpParams::square3x3(MappingKind::U2)).unwrap();
        assert_eq!((m.width(), m.height()), (15, 7));

        let tiny = GrayImage::filled(2, 5, 0).unwrap();
        assert!(matches!(
            lbp_map(&tiny, &LbpParams::square3x3(MappingKind::Raw)),
            Err(Error::ImageTooSmall { min: 3, .. })
        ));
        let p = LbpParams::circular(8, 2.0, MappingKind::Raw).unwrap();
        assert!(lbp_map(&GrayImage::filled(4, 4, 0).unwrap(), &p).is_err());
        assert_eq!(lbp_map(&GrayImage::filled(5, 5, 0).unwrap(), &p).unwrap().labels().len(), 1);
    }

    #[test]
    fn map_matches_pointwise_codes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let im = GrayImage::from_fn(20, 13, |_, _| rng.gen_range(0..6)).unwrap();
        let p = LbpParams::square3x3(MappingKind::Raw);
        let m = lbp_map(&im, &p).unwrap();
        for y in 0..m.height() {
            for x in 0..m.width() {
                let mut patch = [[0u8; 3]; 3];
                for (r, row) in patch.iter_mut().enumerate() {
                    for (c, v) in row.iter_mut().enumerate() {
                        *v = im.get(x + c, y + r);
                    }
                }
                assert_eq!(m.get(x, y), lbp_code_3x3(&patch) as u32);
            }
        }
        for (pn, r) in [(8u32, 1.0), (8, SQRT_2), (12, 2.0)] {
            for mapping in MappingKind::ALL {
                let params = LbpParams::circular(pn, r, mapping).unwrap();
                let op = LbpOperator::new(params).unwrap();
                let m = op.map(&im).unwrap();
                let off = m.origin_offset();
                for y in 0..m.height() {
                    for x in 0..m.width() {
                        let raw = lbp_code_circular(&im, x + off, y + off, &params).unwrap();
                        assert_eq!(m.get(x, y), op.table().get(raw));
                        assert!((m.get(x, y) as usize) < m.label_count());
                    }
                }
            }
        }
    }

    #[test]
    fn increasing_shift_keeps_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let im = GrayImage::from_fn(32, 32, |_, _| rng.gen_range(0..=200)).unwrap();
        let shifted = im.map_values(|v| v + 50);
        let p = LbpParams::square3x3(MappingKind::Raw);
        assert_eq!(lbp_map(&im, &p).unwrap(), lbp_map(&shifted, &p).unwrap());
    }

    #[test]
    fn circular_affine_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let im = GrayImage::from_fn(24, 24, |_, _| rng.gen_range(0..=80)).unwrap();
        let scaled = im.map_values(|v| 3 * v + 7);
        let p = LbpParams::circular(8, 1.0, MappingKind::Raw).unwrap();
        assert_eq!(lbp_map(&im, &p).unwrap().labels(), lbp_map(&scaled, &p).unwrap().labels());
    }
}
