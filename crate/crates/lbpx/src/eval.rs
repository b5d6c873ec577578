//! Train/test evaluation: templates from the train split, nearest-template
//! predictions on the test split, accuracy and confusion matrix.

use std::collections::BTreeSet;

use lbpx_core::{build_templates, grid_descriptor, GrayImage, GridDescriptor, LbpOperator, LbpParams, Metric, Model};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::files::ParamsJson;
use crate::manifest::{Manifest, Split};
use crate::pgm::read_pgm_file;

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub params: LbpParams,
    pub grid: (usize, usize),
    pub metric: Metric,
    /// Per-region weights, required by `wchi2`.
    pub weights: Option<Vec<f64>>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { params: LbpParams::default(), grid: (3, 3), metric: Metric::Chi2, weights: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub params: ParamsJson,
    pub grid: [usize; 2],
    pub metric: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl From<&EvalConfig> for ConfigEcho {
    fn from(c: &EvalConfig) -> Self {
        ConfigEcho {
            params: (&c.params).into(),
            grid: [c.grid.0, c.grid.1],
            metric: c.metric.to_string(),
            weights: c.weights.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    /// Row and column order of `confusion`.
    pub classes: Vec<String>,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<u64>>,
    pub n_test: u64,
    pub fps: Option<f64>,
    pub config: ConfigEcho,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("report: {e}")))
    }
}

/// Grid descriptor of one image under a prepared operator.
pub fn describe(op: &LbpOperator, img: &GrayImage, grid: (usize, usize)) -> Result<GridDescriptor> {
    Ok(grid_descriptor(&op.map(img)?, grid.0, grid.1)?)
}

fn describe_all(op: &LbpOperator, images: &[(String, GrayImage)], grid: (usize, usize)) -> Result<Vec<(String, GridDescriptor)>> {
    images
        .par_iter()
        .map(|(label, img)| Ok((label.clone(), describe(op, img, grid)?)))
        .collect()
}

/// Builds a model from labelled images.
pub fn train(images: &[(String, GrayImage)], config: &EvalConfig) -> Result<Model> {
    let op = LbpOperator::new(config.params)?;
    let samples = describe_all(&op, images, config.grid)?;
    let model = build_templates(&samples)?;
    Ok(match &config.weights {
        Some(w) => model.with_region_weights(w.clone())?,
        None => model,
    })
}

/// Evaluates in-memory train and test sets.
pub fn evaluate_images(
    train_set: &[(String, GrayImage)],
    test_set: &[(String, GrayImage)],
    config: &EvalConfig,
) -> Result<EvalReport> {
    if train_set.is_empty() || test_set.is_empty() {
        return Err(Error::Eval(format!(
            "need at least one train and one test image, got {} and {}",
            train_set.len(),
            test_set.len()
        )));
    }
    let known: BTreeSet<&str> = train_set.iter().map(|(l, _)| l.as_str()).collect();
    if let Some((label, _)) = test_set.iter().find(|(l, _)| !known.contains(l.as_str())) {
        return Err(Error::Eval(format!("test label {label:?} has no training images")));
    }
    let model = train(train_set, config)?;
    let op = LbpOperator::new(config.params)?;
    let classes: Vec<String> = model.labels().map(str::to_string).collect();
    let index = |label: &str| classes.binary_search_by(|c| c.as_str().cmp(label)).expect("label in model");

    let predictions: Vec<(usize, usize)> = test_set
        .par_iter()
        .map(|(label, img)| {
            let pred = model.predict(&describe(&op, img, config.grid)?, config.metric)?;
            Ok((index(label), index(&pred.label)))
        })
        .collect::<Result<_>>()?;

    let mut confusion = vec![vec![0u64; classes.len()]; classes.len()];
    for (truth, predicted) in predictions {
        confusion[truth][predicted] += 1;
    }
    let n_test = test_set.len() as u64;
    let correct: u64 = (0..classes.len()).map(|i| confusion[i][i]).sum();
    Ok(EvalReport {
        accuracy: correct as f64 / n_test as f64,
        classes,
        confusion,
        n_test,
        fps: None,
        config: config.into(),
    })
}

/// Loads the images of one split, in manifest order.
pub fn load_split(manifest: &Manifest, split: Split) -> Result<Vec<(String, GrayImage)>> {
    manifest
        .split(split)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|e| Ok((e.label.clone(), read_pgm_file(manifest.resolve(e))?)))
        .collect()
}

/// Evaluates a manifest: train split builds templates, test split is scored.
pub fn evaluate(manifest: &Manifest, config: &EvalConfig) -> Result<EvalReport> {
    let train_set = load_split(manifest, Split::Train)?;
    let test_set = load_split(manifest, Split::Test)?;
    evaluate_images(&train_set, &test_set, config)
}
