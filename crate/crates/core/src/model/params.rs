use nalgebra::{DMatrix, DVector};

use crate::error::{GlccError, Result};
use crate::graphs::GraphSet;
use crate::sparse::SparseSym;

/// Parameters optimized by training.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Sub-classifier per view, `d_i x c`.
    pub p: Vec<DMatrix<f64>>,
    /// Bias per view, length `c`.
    pub b: Vec<DVector<f64>>,
    /// Laplacian weights, on the simplex.
    pub alpha: Vec<f64>,
    /// Hessian weights, on the simplex.
    pub beta: Vec<f64>,
    /// Predicted label matrix `n x c`. Only present while training.
    pub f: Option<DMatrix<f64>>,
}

impl ModelParams {
    /// Zero sub-classifiers, zero biases and uniform weights.
    pub fn initial(dims: &[usize], c: usize) -> Self {
        let m = dims.len();
        ModelParams {
            p: dims.iter().map(|&d| DMatrix::zeros(d, c)).collect(),
            b: vec![DVector::zeros(c); m],
            alpha: vec![1.0 / m as f64; m],
            beta: vec![1.0 / m as f64; m],
            f: None,
        }
    }

    pub fn m(&self) -> usize {
        self.p.len()
    }

    pub fn c(&self) -> usize {
        self.b.first().map(|b| b.len()).unwrap_or(0)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.p.iter().map(|p| p.nrows()).collect()
    }

    /// Checks shapes and the simplex constraints on the weights.
    pub fn validate(&self, dims: &[usize], c: usize) -> Result<()> {
        if self.p.len() != dims.len() || self.b.len() != dims.len() {
            return Err(GlccError::Data(format!(
                "parameters cover {} views, data has {}",
                self.p.len(),
                dims.len()
            )));
        }
        for (i, (p, &d)) in self.p.iter().zip(dims).enumerate() {
            if p.shape() != (d, c) || self.b[i].len() != c {
                return Err(GlccError::Data(format!(
                    "view {i}: sub-classifier is {}x{} with bias {}, expected {d}x{c} with bias {c}",
                    p.nrows(),
                    p.ncols(),
                    self.b[i].len()
                )));
            }
        }
        for (name, w) in [("alpha", &self.alpha), ("beta", &self.beta)] {
            if w.len() != dims.len() {
                return Err(GlccError::Data(format!(
                    "{name} has {} entries, expected {}",
                    w.len(),
                    dims.len()
                )));
            }
            let sum: f64 = w.iter().sum();
            if (sum - 1.0).abs() > 1e-10 || w.iter().any(|&v| !(v > 0.0)) {
                return Err(GlccError::Numerical(format!(
                    "{name} is not a strictly positive simplex vector: {w:?}"
                )));
            }
        }
        Ok(())
    }
}

/// Diagonal loss weights: `w_large` on labeled samples, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionMatrix(Vec<f64>);

impl SelectionMatrix {
    pub fn new(labeled_mask: &[bool], w_large: f64) -> Self {
        SelectionMatrix(
            labeled_mask
                .iter()
                .map(|&l| if l { w_large } else { 0.0 })
                .collect(),
        )
    }

    pub fn diag(&self) -> &[f64] {
        &self.0
    }

    pub fn num_active(&self) -> usize {
        self.0.iter().filter(|&&w| w > 0.0).count()
    }

    /// `W · M` for a dense `n x c` matrix.
    pub fn apply(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = m.clone();
        for (i, mut row) in out.row_iter_mut().enumerate() {
            row *= self.0[i];
        }
        out
    }
}

/// Group graph regularizer `G = Σ α_i^r L_i + Σ β_i^r Ω_i`.
pub fn group_graph(graphs: &GraphSet, alpha: &[f64], beta: &[f64], r: f64) -> SparseSym {
    let mut terms = Vec::with_capacity(2 * graphs.m());
    for (i, v) in graphs.views.iter().enumerate() {
        terms.push((alpha[i].powf(r), v.laplacian.matrix()));
        terms.push((beta[i].powf(r), v.hessian.matrix()));
    }
    SparseSym::weighted_sum(graphs.n, terms)
}
