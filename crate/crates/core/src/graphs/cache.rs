//! On-disk graph cache.
//!
//! The cache is a JSON document:
//!
//! ```text
//! {
//!   "format": "glcc-graph-cache",
//!   "version": 1,
//!   "config": { "k_graph": .., "k_hess": .., "intrinsic_dim": .., "metric": "euclidean", "zscore": false },
//!   "n": <samples>,
//!   "views": [
//!     { "name": "..", "laplacian": {"n", "rows", "cols", "vals"}, "hessian": {...} },
//!     ...
//!   ]
//! }
//! ```
//!
//! Matrices are stored as upper-triangle triplets sorted by `(row, col)`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GraphConfig, GraphSet, HessianEnergyMatrix, LaplacianMatrix, ViewGraphs};
use crate::error::{GlccError, Result};
use crate::sparse::{SparseSym, Triplets};

pub const GRAPH_CACHE_FORMAT: &str = "glcc-graph-cache";
pub const GRAPH_CACHE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphCache {
    pub format: String,
    pub version: u32,
    pub config: GraphConfig,
    pub n: usize,
    pub views: Vec<CachedView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CachedView {
    pub name: String,
    pub laplacian: Triplets,
    pub hessian: Triplets,
}

impl GraphCache {
    pub fn from_graph_set(graphs: &GraphSet) -> Self {
        GraphCache {
            format: GRAPH_CACHE_FORMAT.to_string(),
            version: GRAPH_CACHE_VERSION,
            config: graphs.config,
            n: graphs.n,
            views: graphs
                .views
                .iter()
                .map(|v| CachedView {
                    name: v.name.clone(),
                    laplacian: v.laplacian.matrix().to_triplets(),
                    hessian: v.hessian.matrix().to_triplets(),
                })
                .collect(),
        }
    }

    /// Converts back to a [`GraphSet`], refusing caches built with settings
    /// other than `expected`.
    pub fn into_graph_set(self, expected: &GraphConfig) -> Result<GraphSet> {
        let mut diffs = Vec::new();
        let c = &self.config;
        if c.k_graph != expected.k_graph {
            diffs.push(format!(
                "k_graph cached={} requested={}",
                c.k_graph, expected.k_graph
            ));
        }
        if c.k_hess != expected.k_hess {
            diffs.push(format!(
                "k_hess cached={} requested={}",
                c.k_hess, expected.k_hess
            ));
        }
        if c.intrinsic_dim != expected.intrinsic_dim {
            diffs.push(format!(
                "intrinsic_dim cached={} requested={}",
                c.intrinsic_dim, expected.intrinsic_dim
            ));
        }
        if c.metric != expected.metric {
            diffs.push(format!(
                "metric cached={} requested={}",
                c.metric, expected.metric
            ));
        }
        if c.zscore != expected.zscore {
            diffs.push(format!(
                "zscore cached={} requested={}",
                c.zscore, expected.zscore
            ));
        }
        if !diffs.is_empty() {
            return Err(GlccError::ConfigMismatch(format!(
                "graph cache does not match: {}",
                diffs.join(", ")
            )));
        }

        let mut views = Vec::with_capacity(self.views.len());
        for v in self.views {
            let ctx = |e: GlccError| e.context(format!("cached view '{}'", v.name));
            let lap = SparseSym::from_triplets(&v.laplacian).map_err(ctx)?;
            let hes = SparseSym::from_triplets(&v.hessian).map_err(ctx)?;
            if lap.n() != self.n || hes.n() != self.n {
                return Err(GlccError::Data(format!(
                    "cached view '{}' has matrices of size {}/{} but the cache declares n={}",
                    v.name,
                    lap.n(),
                    hes.n(),
                    self.n
                )));
            }
            views.push(ViewGraphs {
                name: v.name,
                laplacian: LaplacianMatrix::from_matrix(lap),
                hessian: HessianEnergyMatrix::from_parts(hes, c.intrinsic_dim, c.k_hess),
            });
        }
        Ok(GraphSet {
            n: self.n,
            config: self.config,
            views,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph cache serializes")
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let cache: GraphCache =
            serde_json::from_str(text).map_err(|e| GlccError::format(origin, e.to_string()))?;
        if cache.format != GRAPH_CACHE_FORMAT {
            return Err(GlccError::format(
                origin,
                format!(
                    "expected format '{GRAPH_CACHE_FORMAT}', found '{}'",
                    cache.format
                ),
            ));
        }
        if cache.version != GRAPH_CACHE_VERSION {
            return Err(GlccError::format(
                origin,
                format!("unsupported graph cache version {}", cache.version),
            ));
        }
        Ok(cache)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| GlccError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| GlccError::io(path, e))?;
        Self::from_json(&text, path)
    }
}
