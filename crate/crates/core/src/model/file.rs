//! Model file.
//!
//! A JSON document:
//!
//! ```text
//! {
//!   "format": "glcc-model",
//!   "version": 1,
//!   "c": <classes>, "m": <views>,
//!   "classes": ["..", ..],
//!   "views": [ { "name": "..", "dim": d, "p": [d*c values, row-major], "b": [c values] }, .. ],
//!   "alpha": [m values], "beta": [m values],
//!   "config": { TrainConfig fields }
//! }
//! ```
//!
//! Floats are written in shortest round-trip form and parsed with correct
//! rounding, so a saved model reloads bit for bit.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use super::params::ModelParams;
use crate::error::{GlccError, Result};

pub const MODEL_FORMAT: &str = "glcc-model";
pub const MODEL_VERSION: u32 = 1;

/// A trained classifier together with everything needed to apply it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub class_names: Vec<String>,
    pub view_names: Vec<String>,
    pub params: ModelParams,
    pub config: TrainConfig,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    c: usize,
    m: usize,
    classes: Vec<String>,
    views: Vec<ViewEntry>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    config: TrainConfig,
}

#[derive(Serialize, Deserialize)]
struct ViewEntry {
    name: String,
    dim: usize,
    p: Vec<f64>,
    b: Vec<f64>,
}

impl TrainedModel {
    pub fn new(
        class_names: Vec<String>,
        view_names: Vec<String>,
        mut params: ModelParams,
        config: TrainConfig,
    ) -> Self {
        params.f = None;
        TrainedModel {
            class_names,
            view_names,
            params,
            config,
        }
    }

    pub fn to_json(&self) -> String {
        let c = self.class_names.len();
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            c,
            m: self.view_names.len(),
            classes: self.class_names.clone(),
            views: self
                .view_names
                .iter()
                .zip(self.params.p.iter().zip(&self.params.b))
                .map(|(name, (p, b))| ViewEntry {
                    name: name.clone(),
                    dim: p.nrows(),
                    p: p.transpose().as_slice().to_vec(),
                    b: b.as_slice().to_vec(),
                })
                .collect(),
            alpha: self.params.alpha.clone(),
            beta: self.params.beta.clone(),
            config: self.config.clone(),
        };
        serde_json::to_string_pretty(&file).expect("model serializes")
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let bad = |msg: String| GlccError::format(origin, msg);
        let file: ModelFile = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        if file.format != MODEL_FORMAT {
            return Err(bad(format!(
                "expected format '{MODEL_FORMAT}', found '{}'",
                file.format
            )));
        }
        if file.version != MODEL_VERSION {
            return Err(bad(format!("unsupported model version {}", file.version)));
        }
        if file.classes.len() != file.c || file.views.len() != file.m {
            return Err(bad(format!(
                "declares c={} m={} but lists {} classes and {} views",
                file.c,
                file.m,
                file.classes.len(),
                file.views.len()
            )));
        }
        let c = file.c;
        let mut p = Vec::with_capacity(file.m);
        let mut b = Vec::with_capacity(file.m);
        let mut names = Vec::with_capacity(file.m);
        for v in file.views {
            if v.p.len() != v.dim * c || v.b.len() != c {
                return Err(bad(format!(
                    "view '{}' holds {} weights and {} biases, expected {} and {c}",
                    v.name,
                    v.p.len(),
                    v.b.len(),
                    v.dim * c
                )));
            }
            p.push(DMatrix::from_row_slice(v.dim, c, &v.p));
            b.push(DVector::from_vec(v.b));
            names.push(v.name);
        }
        let params = ModelParams {
            p,
            b,
            alpha: file.alpha,
            beta: file.beta,
            f: None,
        };
        let dims = params.dims();
        params.validate(&dims, c).map_err(|e| bad(e.to_string()))?;
        Ok(TrainedModel {
            class_names: file.classes,
            view_names: names,
            params,
            config: file.config,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| GlccError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| GlccError::io(path, e))?;
        Self::from_json(&text, path)
    }
}
