//! JSON file formats: LBP parameters, descriptors, models and detection lines.
//!
//! Model file:
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "params": {"neighbors": 8, "radius": 1.0, "sampling": "square3x3", "mapping": "u2"},
//!   "grid": [3, 3],
//!   "classes": [{"label": "happy", "template": [0.0, ...]}],
//!   "weights": [1.0, ...]
//! }
//! ```
//!
//! `weights` is omitted when the model has none. Keys are always written in
//! the order above, and reals are written with the shortest representation
//! that parses back to the same `f64`.

use std::io::Write;
use std::path::Path;

use lbpx_core::{Detection, GridDescriptor, LbpParams, MappingKind, Model, Sampling, MODEL_FORMAT_VERSION};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsJson {
    pub neighbors: u32,
    pub radius: f64,
    pub sampling: String,
    pub mapping: String,
}

impl From<&LbpParams> for ParamsJson {
    fn from(p: &LbpParams) -> Self {
        ParamsJson {
            neighbors: p.neighbors(),
            radius: p.radius(),
            sampling: p.sampling().to_string(),
            mapping: p.mapping().to_string(),
        }
    }
}

impl TryFrom<&ParamsJson> for LbpParams {
    type Error = Error;

    fn try_from(p: &ParamsJson) -> Result<Self> {
        let sampling: Sampling = p.sampling.parse().map_err(|e| Error::Format(format!("params: {e}")))?;
        let mapping: MappingKind = p.mapping.parse().map_err(|e| Error::Format(format!("params: {e}")))?;
        LbpParams::new(p.neighbors, p.radius, sampling, mapping).map_err(|e| Error::Format(format!("params: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassJson {
    label: String,
    template: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelJson {
    format_version: u32,
    params: ParamsJson,
    grid: [usize; 2],
    classes: Vec<ClassJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
}

pub fn model_to_json(model: &Model) -> String {
    let (rows, cols) = model.grid();
    let doc = ModelJson {
        format_version: model.format_version(),
        params: model.params().into(),
        grid: [rows, cols],
        classes: model
            .classes()
            .iter()
            .map(|c| ClassJson { label: c.label.clone(), template: c.template.values.clone() })
            .collect(),
        weights: model.region_weights().map(<[f64]>::to_vec),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("model serialises");
    s.push('\n');
    s
}

pub fn model_from_json(text: &str) -> Result<Model> {
    let doc: ModelJson = serde_json::from_str(text).map_err(|e| Error::Format(format!("model: {e}")))?;
    if doc.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::Format(format!(
            "model format_version {} (this build reads {MODEL_FORMAT_VERSION})",
            doc.format_version
        )));
    }
    let params = LbpParams::try_from(&doc.params)?;
    let classes = doc.classes.into_iter().map(|c| (c.label, c.template)).collect();
    Model::new(params, doc.grid[0], doc.grid[1], classes, doc.weights)
        .map_err(|e| Error::Format(format!("model: {e}")))
}

pub fn read_model_file(path: impl AsRef<Path>) -> Result<Model> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_json(&text).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DescriptorJson {
    grid: [usize; 2],
    params: ParamsJson,
    bins: Vec<f64>,
}

pub fn descriptor_to_json(d: &GridDescriptor) -> String {
    let doc = DescriptorJson { grid: [d.grid_rows, d.grid_cols], params: (&d.params).into(), bins: d.values.clone() };
    let mut s = serde_json::to_string_pretty(&doc).expect("descriptor serialises");
    s.push('\n');
    s
}

pub fn descriptor_from_json(text: &str) -> Result<GridDescriptor> {
    let doc: DescriptorJson = serde_json::from_str(text).map_err(|e| Error::Format(format!("descriptor: {e}")))?;
    let params = LbpParams::try_from(&doc.params)?;
    GridDescriptor::new(doc.grid[0], doc.grid[1], params, doc.bins).map_err(|e| Error::Format(format!("descriptor: {e}")))
}

/// One detection as a single JSON line, score with six decimals.
pub fn detection_line(d: &Detection) -> String {
    format!(
        "{{\"x\":{},\"y\":{},\"w\":{},\"h\":{},\"score\":{:.6}}}",
        d.x, d.y, d.width, d.height, d.score
    )
}

pub fn write_detection_lines(out: &mut dyn Write, detections: &[Detection]) -> std::io::Result<()> {
    for d in detections {
        writeln!(out, "{}", detection_line(d))?;
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectionJson {
    x: usize,
    y: usize,
    w: usize,
    h: usize,
    score: f64,
}

/// Parses detection lines back; blank lines are skipped.
pub fn parse_detection_lines(text: &str) -> Result<Vec<Detection>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let d: DetectionJson = serde_json::from_str(l).map_err(|e| Error::Format(format!("detection: {e}")))?;
            Ok(Detection { x: d.x, y: d.y, width: d.w, height: d.h, score: d.score })
        })
        .collect()
}
