//! Single-scale sliding-window template search.

use alloc::format;
use alloc::vec::Vec;

use crate::classify::{distance, Metric, Model};
use crate::descriptor::{grid_descriptor_window, GridDescriptor};
use crate::error::{param_err, Error, Result};
use crate::image::GrayImage;
use crate::lbp::LbpOperator;

/// A window whose descriptor is within the threshold of the face template.
/// `score` is the chi-square distance; lower is better.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
    pub score: f64,
}

impl Detection {
    #[inline]
    pub fn area(&self) -> usize {
        self.width * self.height
    }
}

/// Intersection over union of two inclusive pixel rectangles.
pub fn iou(a: &Detection, b: &Detection) -> f64 {
    let ix = (a.x + a.width).min(b.x + b.width).saturating_sub(a.x.max(b.x));
    let iy = (a.y + a.height).min(b.y + b.height).saturating_sub(a.y.max(b.y));
    let inter = ix * iy;
    let union = a.area() + b.area() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Greedy non-maximum suppression, keeping the lowest score first.
///
/// Equal scores keep their input order, so feeding the output of
/// [`scan_detect`] breaks ties by scan position.
pub fn nms(detections: &[Detection], iou_threshold: f64) -> Vec<Detection> {
    let mut order: Vec<&Detection> = detections.iter().collect();
    order.sort_by(|a, b| a.score.total_cmp(&b.score));
    let mut kept: Vec<Detection> = Vec::new();
    for d in order {
        if kept.iter().all(|k| iou(k, d) <= iou_threshold) {
            kept.push(*d);
        }
    }
    kept
}

/// Picks the face template: the only class, or the one labelled `"face"`.
fn face_template(model: &Model) -> Result<&GridDescriptor> {
    match model.classes() {
        [only] => Ok(&only.template),
        _ => model.template("face").ok_or_else(|| {
            Error::ModelMismatch(format!(
                "detection needs a single-class model or a \"face\" class, got {} classes",
                model.classes().len()
            ))
        }),
    }
}

/// Slides a `window.0 × window.1` window over `scene` on a `stride` grid and
/// returns every position whose chi-square distance to the face template is
/// at most `threshold`, sorted ascending by distance (scan order on ties).
pub fn scan_detect(
    scene: &GrayImage,
    model: &Model,
    window: (usize, usize),
    stride: usize,
    threshold: f64,
) -> Result<Vec<Detection>> {
    let (win_w, win_h) = window;
    if stride == 0 {
        return Err(param_err!("stride must be at least 1"));
    }
    if threshold.is_nan() || threshold < 0.0 {
        return Err(param_err!("threshold must be >= 0, got {threshold}"));
    }
    if win_w == 0 || win_h == 0 || win_w > scene.width() || win_h > scene.height() {
        return Err(param_err!(
            "window {win_w}x{win_h} does not fit a {}x{} scene",
            scene.width(),
            scene.height()
        ));
    }
    let template = face_template(model)?;
    let op = LbpOperator::new(*model.params())?;
    let off = model.params().origin_offset();
    if win_w < 2 * off + 1 || win_h < 2 * off + 1 {
        return Err(Error::ImageTooSmall { width: win_w, height: win_h, min: 2 * off + 1 });
    }
    let map = op.map(scene)?;
    let (rows, cols) = model.grid();
    let (map_w, map_h) = (win_w - 2 * off, win_h - 2 * off);

    let mut hits = Vec::new();
    for y in (0..=scene.height() - win_h).step_by(stride) {
        for x in (0..=scene.width() - win_w).step_by(stride) {
            let d = grid_descriptor_window(&map, x, y, map_w, map_h, rows, cols)?;
            let score = distance(&d.values, &template.values, Metric::Chi2, None)?;
            if score <= threshold {
                hits.push(Detection { x, y, width: win_w, height: win_h, score });
            }
        }
    }
    // stable: equal scores stay in row-major scan order
    hits.sort_by(|a, b| a.score.total_cmp(&b.score));
    Ok(hits)
}
