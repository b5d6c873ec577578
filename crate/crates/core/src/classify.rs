//! Histogram distances and nearest-template classification.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::descriptor::GridDescriptor;
use crate::error::{param_err, Error, Result};
use crate::lbp::LbpParams;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Metric {
    /// Σ (a−b)² / (a+b), bins with a+b = 0 skipped.
    #[default]
    Chi2,
    /// Chi-square with each region's partial sum scaled by its weight.
    WeightedChi2,
    /// 1 − Σ min(a, b) / mean mass of the two inputs.
    Intersect,
    /// Σ |a − b|.
    L1,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Chi2, Metric::WeightedChi2, Metric::Intersect, Metric::L1];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Chi2 => "chi2",
            Metric::WeightedChi2 => "wchi2",
            Metric::Intersect => "intersect",
            Metric::L1 => "l1",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chi2" => Ok(Metric::Chi2),
            "wchi2" => Ok(Metric::WeightedChi2),
            "intersect" => Ok(Metric::Intersect),
            "l1" => Ok(Metric::L1),
            other => Err(param_err!("unknown metric {other:?} (expected chi2, wchi2, intersect or l1)")),
        }
    }
}

#[inline]
fn chi2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let s = x + y;
            if s == 0.0 {
                0.0
            } else {
                let d = x - y;
                d * d / s
            }
        })
        .sum()
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(param_err!("region weights must be finite and non-negative, got {w}"));
    }
    Ok(())
}

/// Distance between two descriptor value vectors.
///
/// `weights` is only read by [`Metric::WeightedChi2`], where it holds one
/// weight per region and the vectors split into that many equal slices.
pub fn distance(a: &[f64], b: &[f64], metric: Metric, weights: Option<&[f64]>) -> Result<f64> {
    if a.len() != b.len() {
        return Err(param_err!("descriptor lengths differ: {} vs {}", a.len(), b.len()));
    }
    Ok(match metric {
        Metric::Chi2 => chi2(a, b),
        Metric::WeightedChi2 => {
            let w = weights.ok_or_else(|| param_err!("wchi2 needs region weights"))?;
            check_weights(w)?;
            if w.is_empty() || !a.len().is_multiple_of(w.len()) {
                return Err(param_err!("{} region weights do not divide {} values", w.len(), a.len()));
            }
            let n = a.len() / w.len();
            if n == 0 {
                return Ok(0.0);
            }
            a.chunks_exact(n).zip(b.chunks_exact(n)).zip(w).map(|((x, y), &wt)| wt * chi2(x, y)).sum()
        }
        Metric::Intersect => {
            let mass = (a.iter().sum::<f64>() + b.iter().sum::<f64>()) / 2.0;
            if mass == 0.0 {
                0.0
            } else {
                let overlap: f64 = a.iter().zip(b).map(|(&x, &y)| x.min(y)).sum();
                (1.0 - overlap / mass).max(0.0)
            }
        }
        Metric::L1 => a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).sum(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassTemplate {
    pub label: String,
    pub template: GridDescriptor,
}

/// Per-class template descriptors sharing one LBP configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    params: LbpParams,
    grid_rows: usize,
    grid_cols: usize,
    classes: Vec<ClassTemplate>,
    region_weights: Option<Vec<f64>>,
    format_version: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: String,
    pub distance: f64,
    /// Distance to every class, in model order.
    pub scores: Vec<(String, f64)>,
}

/// Index of the smallest score. Equal scores go to the lexicographically
/// smallest label.
pub fn nearest<S: AsRef<str>>(scores: &[(S, f64)]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, (label, d)) in scores.iter().enumerate() {
        best = match best {
            None => Some(i),
            Some(j) => {
                let (bl, bd) = (&scores[j].0, scores[j].1);
                if *d < bd || (*d == bd && label.as_ref() < bl.as_ref()) {
                    Some(i)
                } else {
                    Some(j)
                }
            }
        };
    }
    best
}

impl Model {
    /// Assembles a model from stored templates (e.g. a deserialised file).
    /// Classes are sorted by label; duplicate labels are rejected.
    pub fn new(
        params: LbpParams,
        grid_rows: usize,
        grid_cols: usize,
        classes: Vec<(String, Vec<f64>)>,
        region_weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::Training("model has no classes".to_string()));
        }
        let mut templates = Vec::with_capacity(classes.len());
        for (label, values) in classes {
            let template = GridDescriptor::new(grid_rows, grid_cols, params, values)
                .map_err(|e| Error::ModelMismatch(format!("class {label:?}: {e}")))?;
            templates.push(ClassTemplate { label, template });
        }
        templates.sort_by(|a, b| a.label.cmp(&b.label));
        if let Some(w) = templates.windows(2).find(|w| w[0].label == w[1].label) {
            return Err(Error::Training(format!("duplicate class label {:?}", w[0].label)));
        }
        let model = Model {
            params,
            grid_rows,
            grid_cols,
            classes: templates,
            region_weights: None,
            format_version: MODEL_FORMAT_VERSION,
        };
        match region_weights {
            Some(w) => model.with_region_weights(w),
            None => Ok(model),
        }
    }

    /// Attaches one non-negative weight per grid region (used by `wchi2`).
    pub fn with_region_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        let regions = self.grid_rows * self.grid_cols;
        if weights.len() != regions {
            return Err(param_err!("{} region weights for a {regions}-region grid", weights.len()));
        }
        check_weights(&weights)?;
        self.region_weights = Some(weights);
        Ok(self)
    }

    #[inline]
    pub fn params(&self) -> &LbpParams {
        &self.params
    }

    #[inline]
    pub fn grid(&self) -> (usize, usize) {
        (self.grid_rows, self.grid_cols)
    }

    #[inline]
    pub fn classes(&self) -> &[ClassTemplate] {
        &self.classes
    }

    #[inline]
    pub fn region_weights(&self) -> Option<&[f64]> {
        self.region_weights.as_deref()
    }

    #[inline]
    pub fn format_version(&self) -> u32 {
        self.format_version
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.classes.iter().map(|c| c.label.as_str())
    }

    pub fn template(&self, label: &str) -> Option<&GridDescriptor> {
        self.classes.iter().find(|c| c.label == label).map(|c| &c.template)
    }

    pub fn check_query(&self, query: &GridDescriptor) -> Result<()> {
        let t = &self.classes[0].template;
        if !t.same_config(query) {
            return Err(Error::ModelMismatch(format!(
                "query {}x{} grid, {} values, {:?} does not match model {}x{} grid, {} values, {:?}",
                query.grid_rows,
                query.grid_cols,
                query.values.len(),
                query.params,
                t.grid_rows,
                t.grid_cols,
                t.values.len(),
                t.params
            )));
        }
        Ok(())
    }

    /// Distance from `query` to every class template, in model order.
    pub fn scores(&self, query: &GridDescriptor, metric: Metric) -> Result<Vec<(String, f64)>> {
        self.check_query(query)?;
        let weights = self.region_weights.as_deref();
        self.classes
            .iter()
            .map(|c| Ok((c.label.clone(), distance(&query.values, &c.template.values, metric, weights)?)))
            .collect()
    }

    /// Nearest template under `metric`.
    pub fn predict(&self, query: &GridDescriptor, metric: Metric) -> Result<Prediction> {
        let scores = self.scores(query, metric)?;
        let best = nearest(&scores).expect("model has at least one class");
        Ok(Prediction { label: scores[best].0.clone(), distance: scores[best].1, scores })
    }
}

/// Builds one template per class: the element-wise mean of that class's
/// descriptors, with every region slice renormalised to sum to one.
pub fn build_templates<S: AsRef<str>>(samples: &[(S, GridDescriptor)]) -> Result<Model> {
    let (_, first) = samples.first().ok_or_else(|| Error::Training("no training samples".to_string()))?;
    let mut sums: BTreeMap<&str, (Vec<f64>, usize)> = BTreeMap::new();
    for (i, (label, d)) in samples.iter().enumerate() {
        if !first.same_config(d) {
            return Err(Error::ModelMismatch(format!(
                "sample {i} ({:?}) has a different grid or LBP configuration than sample 0",
                label.as_ref()
            )));
        }
        let entry = sums.entry(label.as_ref()).or_insert_with(|| (vec![0.0; d.values.len()], 0));
        entry.0.iter_mut().zip(&d.values).for_each(|(s, v)| *s += v);
        entry.1 += 1;
    }
    let bin_count = first.bin_count();
    let classes = sums
        .into_iter()
        .map(|(label, (mut sum, n))| {
            if n == 1 {
                return (label.to_string(), sum);
            }
            let n = n as f64;
            sum.iter_mut().for_each(|v| *v /= n);
            for region in sum.chunks_exact_mut(bin_count) {
                let total: f64 = region.iter().sum();
                if total > 0.0 {
                    region.iter_mut().for_each(|v| *v /= total);
                }
            }
            (label.to_string(), sum)
        })
        .collect();
    Model::new(first.params, first.grid_rows, first.grid_cols, classes, None)
}
