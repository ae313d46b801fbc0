//! Closed-form block updates of the alternating minimization.
//!
//! Each operator minimizes the training objective exactly over one block of
//! variables with all other blocks held fixed, so applying any of them never
//! increases the objective.

use log::{info, warn};
use nalgebra::{DMatrix, DVector};

use super::config::TrainConfig;
use super::params::{group_graph, ModelParams, SelectionMatrix};
use crate::data::MultiFeatureDataset;
use crate::error::{GlccError, Result};
use crate::graphs::GraphSet;
use crate::linalg::{column_means, ridge_solve, spd_solve, spd_solve_or_err};

/// Floor applied to graph traces before inverting them.
pub const TRACE_GUARD: f64 = 1e-12;

/// Initial label matrix: the minimizer of the supervised loss plus the
/// graph term with uniform view weights, i.e. the solution of
/// `(W + λG) F = W Y`.
pub fn init_f(
    graphs: &GraphSet,
    y: &DMatrix<f64>,
    w: &SelectionMatrix,
    config: &TrainConfig,
) -> Result<DMatrix<f64>> {
    if w.num_active() == 0 {
        return Err(GlccError::NoSupervision);
    }
    let m = graphs.m();
    let uniform = vec![1.0 / m as f64; m];
    let g = group_graph(graphs, &uniform, &uniform, config.r);
    let n = graphs.n;

    let mut a = DMatrix::zeros(n, n);
    g.add_scaled_to_dense(config.lambda, &mut a);
    let graph_diag_max = (0..n).map(|i| a[(i, i)].abs()).fold(0.0, f64::max);
    for (i, &wi) in w.diag().iter().enumerate() {
        a[(i, i)] += wi;
    }
    let rhs = w.apply(y);

    if let Some(f) = spd_solve(a.clone(), &rhs) {
        return Ok(f);
    }
    // Some connected component carries no label, so the system is only
    // semidefinite. A tiny ridge selects the solution that is zero there.
    let jitter = 1e-10 * graph_diag_max.max(1.0);
    warn!("initial label system is singular; retrying with diagonal shift {jitter:e}");
    for i in 0..n {
        a[(i, i)] += jitter;
    }
    spd_solve_or_err(a, &rhs, "initial label system")
}

/// Ridge update of one sub-classifier:
/// `P = (XᵀX + γI)⁻¹ Xᵀ (F − 1 bᵀ)`.
pub fn update_p(
    x: &DMatrix<f64>,
    f: &DMatrix<f64>,
    b: &DVector<f64>,
    gamma: f64,
) -> Result<DMatrix<f64>> {
    if !(gamma > 0.0) {
        return Err(GlccError::Param(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let mut target = f.clone();
    for mut row in target.row_iter_mut() {
        row -= b.transpose();
    }
    ridge_solve(x, &target, gamma)
}

/// Bias update: the column mean of `F − X P`.
pub fn update_b(x: &DMatrix<f64>, f: &DMatrix<f64>, p: &DMatrix<f64>) -> DVector<f64> {
    column_means(&(f - x * p))
}

/// Label-matrix update: solves `(mI + W + λG) F = Σ_i (X_i P_i + 1 B_iᵀ) + W Y`
/// with `G` built from the current view weights.
pub fn update_f(
    dataset: &MultiFeatureDataset,
    graphs: &GraphSet,
    params: &ModelParams,
    w: &SelectionMatrix,
    y: &DMatrix<f64>,
    config: &TrainConfig,
) -> Result<DMatrix<f64>> {
    let n = dataset.n();
    let m = dataset.m();
    let mut rhs = w.apply(y);
    for (i, view) in dataset.views().iter().enumerate() {
        let mut pred = &view.data * &params.p[i];
        for mut row in pred.row_iter_mut() {
            row += params.b[i].transpose();
        }
        rhs += pred;
    }
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(GlccError::Numerical(
            "label update right-hand side is not finite".into(),
        ));
    }

    let g = group_graph(graphs, &params.alpha, &params.beta, config.r);
    let mut a = DMatrix::zeros(n, n);
    g.add_scaled_to_dense(config.lambda, &mut a);
    for (i, &wi) in w.diag().iter().enumerate() {
        a[(i, i)] += m as f64 + wi;
    }
    spd_solve_or_err(a, &rhs, "label update system")
}

/// Closed-form minimizer of `Σ_i w_i^r t_i` over the probability simplex:
/// `w_i ∝ (1 / t_i)^{1/(r−1)}`, with traces floored at [`TRACE_GUARD`].
///
/// Computed in log space so that extreme traces or `r` close to one do not
/// overflow.
pub fn simplex_weights(traces: &[f64], r: f64) -> Result<Vec<f64>> {
    if !(r > 1.0) {
        return Err(GlccError::Param(format!("r must exceed 1, got {r}")));
    }
    if let Some(t) = traces
        .iter()
        .find(|t| !t.is_finite() || **t < -1e-8 * (1.0 + t.abs()))
    {
        return Err(GlccError::Numerical(format!(
            "graph trace {t} is negative or not finite"
        )));
    }
    if traces.iter().all(|&t| t <= TRACE_GUARD) {
        info!("all graph traces vanish; using uniform weights");
        return Ok(vec![1.0 / traces.len() as f64; traces.len()]);
    }
    let e = 1.0 / (r - 1.0);
    let logs: Vec<f64> = traces
        .iter()
        .map(|&t| -e * t.max(TRACE_GUARD).ln())
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let sum: f64 = exps.iter().sum();
    Ok(exps.into_iter().map(|v| v / sum).collect())
}

/// Laplacian and Hessian weights for the current label matrix.
pub fn update_weights(f: &DMatrix<f64>, graphs: &GraphSet, r: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let lap: Vec<f64> = graphs
        .views
        .iter()
        .map(|v| v.laplacian.matrix().trace_quad(f))
        .collect();
    let hes: Vec<f64> = graphs
        .views
        .iter()
        .map(|v| v.hessian.matrix().trace_quad(f))
        .collect();
    Ok((simplex_weights(&lap, r)?, simplex_weights(&hes, r)?))
}
