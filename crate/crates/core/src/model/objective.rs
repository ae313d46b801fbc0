use nalgebra::DMatrix;

use super::config::TrainConfig;
use super::params::{ModelParams, SelectionMatrix};
use crate::data::MultiFeatureDataset;
use crate::error::{GlccError, Result};
use crate::graphs::GraphSet;

/// The four terms of the training objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveTerms {
    /// `Σ_i ‖F − X_i P_i − 1 B_iᵀ‖²`
    pub fit: f64,
    /// `γ Σ_i ‖P_i‖²`
    pub ridge: f64,
    /// `Tr((F − Y)ᵀ W (F − Y))`
    pub loss: f64,
    /// `λ Tr(Fᵀ G F)`
    pub smoothness: f64,
}

impl ObjectiveTerms {
    pub fn total(&self) -> f64 {
        self.fit + self.ridge + self.loss + self.smoothness
    }
}

/// Residual `F − X P − 1 bᵀ` of one view.
pub(crate) fn view_residual(
    x: &DMatrix<f64>,
    f: &DMatrix<f64>,
    p: &DMatrix<f64>,
    b: &nalgebra::DVector<f64>,
) -> DMatrix<f64> {
    let mut r = f - x * p;
    for mut row in r.row_iter_mut() {
        row -= b.transpose();
    }
    r
}

/// Evaluates every term of the objective at `params`.
pub fn objective_terms(
    dataset: &MultiFeatureDataset,
    graphs: &GraphSet,
    params: &ModelParams,
    config: &TrainConfig,
) -> Result<ObjectiveTerms> {
    let f = params
        .f
        .as_ref()
        .ok_or_else(|| GlccError::Data("objective needs the predicted label matrix F".into()))?;
    check_shapes(dataset, graphs, params, f)?;

    let mut fit = 0.0;
    let mut ridge = 0.0;
    for (i, view) in dataset.views().iter().enumerate() {
        fit += view_residual(&view.data, f, &params.p[i], &params.b[i]).norm_squared();
        ridge += params.p[i].norm_squared();
    }
    ridge *= config.gamma;

    let w = SelectionMatrix::new(dataset.labeled_mask(), config.w_large);
    let diff = f - dataset.y();
    let loss: f64 = diff
        .row_iter()
        .zip(w.diag())
        .map(|(row, &wi)| {
            if wi > 0.0 {
                wi * row.norm_squared()
            } else {
                0.0
            }
        })
        .sum();

    let mut energy = 0.0;
    for (i, v) in graphs.views.iter().enumerate() {
        energy += params.alpha[i].powf(config.r) * v.laplacian.matrix().trace_quad(f);
        energy += params.beta[i].powf(config.r) * v.hessian.matrix().trace_quad(f);
    }
    let terms = ObjectiveTerms {
        fit,
        ridge,
        loss,
        smoothness: config.lambda * energy,
    };
    for (name, v) in [
        ("fit", terms.fit),
        ("ridge", terms.ridge),
        ("loss", terms.loss),
        ("smoothness", terms.smoothness),
    ] {
        if !v.is_finite() {
            return Err(GlccError::Numerical(format!(
                "objective term '{name}' is {v}"
            )));
        }
    }
    Ok(terms)
}

/// `γ_k = k·u / (1 − k·u)` from the standard floating-point summation bound.
fn gamma_k(k: usize) -> f64 {
    let ku = k as f64 * f64::EPSILON / 2.0;
    ku / (1.0 - ku)
}

/// Upper bound on the rounding error of [`objective`] at `params`.
///
/// The graph term sums entries of very different size (local Hessian fits on
/// nearly degenerate neighborhoods produce large weights), so its computed
/// value can be off by much more than `ε·J`. Changes below this bound are not
/// resolvable.
pub fn objective_rounding_bound(
    dataset: &MultiFeatureDataset,
    graphs: &GraphSet,
    params: &ModelParams,
    config: &TrainConfig,
) -> Result<f64> {
    let f = params
        .f
        .as_ref()
        .ok_or_else(|| GlccError::Data("objective needs the predicted label matrix F".into()))?;
    check_shapes(dataset, graphs, params, f)?;
    let (n, c) = f.shape();
    let entries = n * c;

    let mut bound = 0.0;
    for (i, view) in dataset.views().iter().enumerate() {
        let x = &view.data;
        let r = view_residual(x, f, &params.p[i], &params.b[i]);
        let mut scale = x.abs() * params.p[i].abs() + f.abs();
        for mut row in scale.row_iter_mut() {
            row += params.b[i].abs().transpose();
        }
        let g = gamma_k(x.ncols() + 2);
        let elementwise: f64 = r
            .iter()
            .zip(scale.iter())
            .map(|(a, m)| 2.0 * a.abs() * g * m + (g * m).powi(2))
            .sum();
        bound += elementwise + gamma_k(entries) * r.norm_squared();
        bound += config.gamma * gamma_k(params.p[i].len() + 1) * params.p[i].norm_squared();
    }

    let w = SelectionMatrix::new(dataset.labeled_mask(), config.w_large);
    for (k, &wi) in w.diag().iter().enumerate() {
        if wi > 0.0 {
            for j in 0..c {
                let d = (f[(k, j)] - dataset.y()[(k, j)]).abs();
                let e = gamma_k(1) * (f[(k, j)].abs() + dataset.y()[(k, j)].abs());
                bound += wi * (2.0 * d * e + e * e);
            }
        }
    }
    let loss = objective_terms(dataset, graphs, params, config)?.loss;
    bound += gamma_k(entries + 2) * loss;

    for (i, v) in graphs.views.iter().enumerate() {
        for (weight, m) in [
            (params.alpha[i].powf(config.r), v.laplacian.matrix()),
            (params.beta[i].powf(config.r), v.hessian.matrix()),
        ] {
            bound += config.lambda
                * weight
                * gamma_k(m.max_row_len() + entries + 2)
                * m.abs_trace_quad(f);
        }
    }
    // the final four-term sum
    Ok(bound
        + gamma_k(4)
            * objective_terms(dataset, graphs, params, config)?
                .total()
                .abs())
}

/// Total training objective.
pub fn objective(
    dataset: &MultiFeatureDataset,
    graphs: &GraphSet,
    params: &ModelParams,
    config: &TrainConfig,
) -> Result<f64> {
    objective_terms(dataset, graphs, params, config).map(|t| t.total())
}

pub(crate) fn check_shapes(
    dataset: &MultiFeatureDataset,
    graphs: &GraphSet,
    params: &ModelParams,
    f: &DMatrix<f64>,
) -> Result<()> {
    if graphs.n != dataset.n() || graphs.m() != dataset.m() {
        return Err(GlccError::Data(format!(
            "graphs cover {} views of {} samples, dataset has {} views of {}",
            graphs.m(),
            graphs.n,
            dataset.m(),
            dataset.n()
        )));
    }
    if f.shape() != (dataset.n(), dataset.c()) {
        return Err(GlccError::Data(format!(
            "F is {}x{}, expected {}x{}",
            f.nrows(),
            f.ncols(),
            dataset.n(),
            dataset.c()
        )));
    }
    params.validate(&dataset.dims(), dataset.c())
}
