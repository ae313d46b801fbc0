//! Hessian energy estimation.
//!
//! For every sample a local chart is fitted: the sample and its nearest
//! neighbors are projected onto their leading principal directions, giving
//! normal coordinates `u` centered at the sample. A full second-order
//! polynomial in `u` is then fitted by least squares. The rows of the design
//! pseudoinverse that produce the quadratic coefficients are linear
//! estimators of the second derivatives at the sample:
//!
//! ```text
//! d²f / du_r du_s |_i  ≈  Σ_j H[r, s, j] f(x_j)
//! ```
//!
//! Squaring and summing these over all ordered pairs `(r, s)` estimates the
//! Frobenius norm of the Hessian at the sample. Its Gram form over the
//! neighborhood is accumulated into a global sparse matrix `Ω` so that
//! `Tr(Fᵀ Ω F)` is the total estimated Hessian energy of `F`.

use log::warn;
use nalgebra::DMatrix;
use rayon::prelude::*;

use super::knn::{neighbors_of_rows, Metric, Rows};
use crate::error::{GlccError, Result};
use crate::linalg::{pseudo_inverse, sorted_symmetric_eigen};
use crate::sparse::SparseSym;

/// Principal directions whose variance is below this fraction of the largest
/// one are treated as absent.
const RANK_TOL: f64 = 1e-12;
/// Relative eigenvalue cutoff of the design's normal matrix.
const PINV_TOL: f64 = 1e-12;

/// Number of coefficients of a full quadratic polynomial in `dim` variables:
/// the smallest admissible Hessian neighborhood.
pub fn min_hessian_neighbors(dim: usize) -> usize {
    1 + dim + dim * (dim + 1) / 2
}

/// Second-derivative estimators at one sample.
#[derive(Debug, Clone)]
pub struct LocalHessian {
    pub center: usize,
    /// Sample indices of the neighborhood; the center comes first.
    pub neighborhood: Vec<usize>,
    /// Tangent directions actually used (smaller than requested on
    /// degenerate neighborhoods).
    pub dim_used: usize,
    /// Coordinate pairs `(r, s)` with `r <= s`, one per estimator row.
    pub pairs: Vec<(usize, usize)>,
    /// `pairs.len() x neighborhood.len()`; row `t` applied to the function
    /// values on the neighborhood estimates `d²f / du_r du_s` at the center.
    pub estimators: DMatrix<f64>,
}

impl LocalHessian {
    /// Estimated second derivative for pair index `t` given values of `f`
    /// at every sample.
    pub fn second_derivative(&self, t: usize, f: &[f64]) -> f64 {
        self.neighborhood
            .iter()
            .enumerate()
            .map(|(a, &j)| self.estimators[(t, a)] * f[j])
            .sum()
    }
}

/// Sparse symmetric Hessian energy matrix together with the settings that
/// produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianEnergyMatrix {
    pub(crate) matrix: SparseSym,
    pub(crate) intrinsic_dim: usize,
    pub(crate) k_hess: usize,
}

impl HessianEnergyMatrix {
    pub fn matrix(&self) -> &SparseSym {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.intrinsic_dim
    }

    pub fn k_hess(&self) -> usize {
        self.k_hess
    }

    pub fn from_parts(matrix: SparseSym, intrinsic_dim: usize, k_hess: usize) -> Self {
        HessianEnergyMatrix {
            matrix,
            intrinsic_dim,
            k_hess,
        }
    }
}

fn check_params(n: usize, k_hess: usize, intrinsic_dim: usize) -> Result<()> {
    if intrinsic_dim == 0 {
        return Err(GlccError::Param("intrinsic_dim must be at least 1".into()));
    }
    let need = min_hessian_neighbors(intrinsic_dim);
    if k_hess < need {
        return Err(GlccError::Param(format!(
            "k_hess={k_hess} is too small to fit a quadratic in {intrinsic_dim} dimensions (need >= {need})"
        )));
    }
    if n <= k_hess {
        return Err(GlccError::Param(format!(
            "k_hess={k_hess} needs more than {k_hess} samples, got {n}"
        )));
    }
    Ok(())
}

/// Per-sample second-derivative estimators.
///
/// `k_hess` counts the sample itself.
pub fn local_hessian_estimators(
    x: &DMatrix<f64>,
    k_hess: usize,
    intrinsic_dim: usize,
) -> Result<Vec<LocalHessian>> {
    let rows = Rows::new(x)?;
    check_params(rows.n, k_hess, intrinsic_dim)?;
    let neighbors = neighbors_of_rows(&rows, k_hess - 1, Metric::Euclidean);
    Ok(neighbors
        .into_par_iter()
        .enumerate()
        .map(|(i, others)| {
            let mut nb = Vec::with_capacity(k_hess);
            nb.push(i);
            nb.extend(others);
            local_fit(&rows, nb, intrinsic_dim)
        })
        .collect())
}

fn local_fit(rows: &Rows, neighborhood: Vec<usize>, dim: usize) -> LocalHessian {
    let k = neighborhood.len();
    let d = rows.d;
    let center = neighborhood[0];

    let mut mean = vec![0.0; d];
    for &j in &neighborhood {
        for (m, v) in mean.iter_mut().zip(rows.row(j)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= k as f64);
    let centered = DMatrix::from_fn(k, d, |a, c| rows.row(neighborhood[a])[c] - mean[c]);

    // Principal directions from the smaller of the two Gram matrices of the
    // centered block. Coordinates are the offsets from the center projected
    // onto those directions, so they are an exact linear image of the points.
    let (values, directions) = if k <= d {
        let (values, left) = sorted_symmetric_eigen(&centered * centered.transpose());
        let right = centered.transpose() * left;
        (values, right)
    } else {
        sorted_symmetric_eigen(centered.transpose() * &centered)
    };
    let top = values.first().copied().unwrap_or(0.0);
    let q = if top > 0.0 {
        values
            .iter()
            .take(dim)
            .filter(|&&v| v > RANK_TOL * top)
            .count()
    } else {
        0
    };

    let empty = |dim_used| LocalHessian {
        center,
        neighborhood: neighborhood.clone(),
        dim_used,
        pairs: Vec::new(),
        estimators: DMatrix::zeros(0, k),
    };
    if q == 0 {
        warn!("sample {center}: degenerate Hessian neighborhood, contributing zero energy");
        return empty(0);
    }
    if q < dim {
        warn!("sample {center}: only {q} of {dim} tangent directions available");
    }
    let mut basis = directions.columns(0, q).into_owned();
    for mut col in basis.column_iter_mut() {
        let norm = col.norm();
        col /= norm;
    }

    // Normal coordinates relative to the center, rescaled to unit radius so
    // the design matrix is well conditioned.
    let offsets = DMatrix::from_fn(k, d, |a, c| {
        rows.row(neighborhood[a])[c] - rows.row(center)[c]
    });
    let mut u = offsets * basis;
    let radius = (0..k).map(|a| u.row(a).norm()).fold(0.0, f64::max);
    if radius == 0.0 {
        warn!("sample {center}: neighborhood collapses onto the sample, contributing zero energy");
        return empty(0);
    }
    u /= radius;

    let mut pairs = Vec::with_capacity(q * (q + 1) / 2);
    for r in 0..q {
        for s in r..q {
            pairs.push((r, s));
        }
    }
    let ncoef = 1 + q + pairs.len();
    let design = DMatrix::from_fn(k, ncoef, |a, col| {
        if col == 0 {
            1.0
        } else if col <= q {
            u[(a, col - 1)]
        } else {
            let (r, s) = pairs[col - 1 - q];
            u[(a, r)] * u[(a, s)]
        }
    });
    let pinv = pseudo_inverse(&design, PINV_TOL);

    let inv_r2 = 1.0 / (radius * radius);
    let estimators = DMatrix::from_fn(pairs.len(), k, |t, a| {
        let (r, s) = pairs[t];
        // f ≈ ... + c_rr u_r² + c_rs u_r u_s: the pure second derivative is
        // twice the coefficient, the mixed one equals it.
        let factor = if r == s { 2.0 } else { 1.0 };
        factor * pinv[(1 + q + t, a)] * inv_r2
    });

    LocalHessian {
        center,
        neighborhood,
        dim_used: q,
        pairs,
        estimators,
    }
}

/// Assembles `Ω` from per-sample estimators.
///
/// Mixed partials appear twice in the Frobenius sum over ordered pairs, so
/// their Gram contribution is doubled.
pub fn assemble_energy(n: usize, locals: &[LocalHessian]) -> SparseSym {
    let mut entries = Vec::new();
    for local in locals {
        let k = local.neighborhood.len();
        for a in 0..k {
            for b in a..k {
                let mut v = 0.0;
                for (t, &(r, s)) in local.pairs.iter().enumerate() {
                    let w = if r == s { 1.0 } else { 2.0 };
                    v += w * local.estimators[(t, a)] * local.estimators[(t, b)];
                }
                entries.push((local.neighborhood[a], local.neighborhood[b], v));
            }
        }
    }
    SparseSym::from_upper_triplets(n, entries)
}

/// Estimates the Hessian energy matrix of the rows of `x`.
pub fn estimate_hessian_energy(
    x: &DMatrix<f64>,
    k_hess: usize,
    intrinsic_dim: usize,
) -> Result<HessianEnergyMatrix> {
    let locals = local_hessian_estimators(x, k_hess, intrinsic_dim)?;
    Ok(HessianEnergyMatrix {
        matrix: assemble_energy(x.nrows(), &locals),
        intrinsic_dim,
        k_hess,
    })
}
