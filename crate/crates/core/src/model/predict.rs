use nalgebra::DMatrix;
use rayon::prelude::*;

use super::params::ModelParams;
use crate::error::{GlccError, Result};

/// Predicted class and the per-class scores it was taken from.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: usize,
    pub scores: Vec<f64>,
}

/// Index of the largest score; ties go to the lowest index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (k, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = k;
        }
    }
    best
}

/// Scores one sample given its feature vector in every view:
/// `Σ_i (z_iᵀ P_i + B_i)`.
pub fn predict(params: &ModelParams, z: &[&[f64]]) -> Result<Prediction> {
    if z.len() != params.m() {
        return Err(GlccError::Data(format!(
            "got {} feature vectors for a model with {} views",
            z.len(),
            params.m()
        )));
    }
    let c = params.c();
    let mut scores = vec![0.0; c];
    for (i, zi) in z.iter().enumerate() {
        let p = &params.p[i];
        if zi.len() != p.nrows() {
            return Err(GlccError::Data(format!(
                "view {i} has {} features, model expects {}",
                zi.len(),
                p.nrows()
            )));
        }
        for (k, s) in scores.iter_mut().enumerate() {
            let mut view_score = params.b[i][k];
            for (j, &v) in zi.iter().enumerate() {
                view_score += v * p[(j, k)];
            }
            *s += view_score;
        }
    }
    Ok(Prediction {
        label: argmax(&scores),
        scores,
    })
}

/// Predicts every row of the given view matrices; each row is scored by
/// [`predict`], so results equal the per-sample loop exactly.
pub fn predict_batch(params: &ModelParams, views: &[DMatrix<f64>]) -> Result<Vec<Prediction>> {
    if views.len() != params.m() {
        return Err(GlccError::Data(format!(
            "got {} views for a model with {} views",
            views.len(),
            params.m()
        )));
    }
    let n = views[0].nrows();
    for (i, v) in views.iter().enumerate() {
        if v.ncols() != params.p[i].nrows() {
            return Err(GlccError::Data(format!(
                "view {i} has {} features, model expects {}",
                v.ncols(),
                params.p[i].nrows()
            )));
        }
        if v.nrows() != n {
            return Err(GlccError::Data(format!(
                "view {i} has {} rows, view 0 has {n}",
                v.nrows()
            )));
        }
    }
    let rows: Vec<Vec<Vec<f64>>> = views
        .iter()
        .map(|v| v.row_iter().map(|r| r.iter().copied().collect()).collect())
        .collect();
    (0..n)
        .into_par_iter()
        .map(|j| {
            let z: Vec<&[f64]> = rows.iter().map(|r| r[j].as_slice()).collect();
            predict(params, &z)
        })
        .collect()
}
