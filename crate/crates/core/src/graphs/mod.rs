//! Per-view graph construction: k-NN adjacency, Laplacian and Hessian energy.

mod cache;
mod hessian;
mod knn;
mod laplacian;

pub use cache::{GraphCache, GRAPH_CACHE_FORMAT, GRAPH_CACHE_VERSION};
pub use hessian::{
    assemble_energy, estimate_hessian_energy, local_hessian_estimators, min_hessian_neighbors,
    HessianEnergyMatrix, LocalHessian,
};
pub use knn::{nearest_neighbors, Metric};
pub use laplacian::{build_adjacency, build_laplacian, AdjacencyMatrix, LaplacianMatrix};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::FeatureView;
use crate::error::{GlccError, Result};

/// Settings that determine the graphs built for a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    pub k_graph: usize,
    pub k_hess: usize,
    pub intrinsic_dim: usize,
    pub metric: Metric,
    /// Standardize each feature column before measuring distances.
    pub zscore: bool,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            k_graph: 10,
            k_hess: 10,
            intrinsic_dim: 2,
            metric: Metric::Euclidean,
            zscore: false,
        }
    }
}

/// Laplacian and Hessian energy of one view.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewGraphs {
    pub name: String,
    pub laplacian: LaplacianMatrix,
    pub hessian: HessianEnergyMatrix,
}

/// Graphs for every view of a dataset, in view order.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSet {
    pub n: usize,
    pub config: GraphConfig,
    pub views: Vec<ViewGraphs>,
}

impl GraphSet {
    pub fn m(&self) -> usize {
        self.views.len()
    }
}

/// Column-standardized copy of `x`; constant columns are only centered.
pub fn zscore(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows() as f64;
    let mut out = x.clone();
    for mut col in out.column_iter_mut() {
        let mean = col.sum() / n;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let sd = var.sqrt();
        for v in col.iter_mut() {
            *v -= mean;
            if sd > 0.0 {
                *v /= sd;
            }
        }
    }
    out
}

/// Builds the Laplacian and Hessian energy of a single view.
pub fn build_view_graphs(view: &FeatureView, config: &GraphConfig) -> Result<ViewGraphs> {
    let normalized;
    let x = if config.zscore {
        normalized = zscore(&view.data);
        &normalized
    } else {
        &view.data
    };
    let ctx = |e: GlccError| e.context(format!("view '{}'", view.name));
    let adjacency = build_adjacency(x, config.k_graph, config.metric).map_err(ctx)?;
    let laplacian = build_laplacian(&adjacency);
    let hessian = estimate_hessian_energy(x, config.k_hess, config.intrinsic_dim).map_err(ctx)?;
    Ok(ViewGraphs {
        name: view.name.clone(),
        laplacian,
        hessian,
    })
}

/// Builds graphs for all views; views are processed in parallel and
/// returned in input order.
pub fn build_graph_set(views: &[FeatureView], config: &GraphConfig) -> Result<GraphSet> {
    let n = views.first().map(|v| v.n()).unwrap_or(0);
    if views.is_empty() {
        return Err(GlccError::Data("no feature views given".into()));
    }
    let built: Vec<Result<ViewGraphs>> = views
        .par_iter()
        .map(|v| build_view_graphs(v, config))
        .collect();
    let views = built.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(GraphSet {
        n,
        config: *config,
        views,
    })
}
