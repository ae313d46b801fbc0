use serde::{Deserialize, Serialize};

use crate::error::{GlccError, Result};
use crate::graphs::{min_hessian_neighbors, GraphConfig, Metric};

/// Hyperparameters of training and graph construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Weight of the group graph regularizer.
    pub lambda: f64,
    /// Ridge penalty on the sub-classifiers.
    pub gamma: f64,
    /// Exponent on the graph weights; must exceed 1.
    pub r: f64,
    pub k_graph: usize,
    pub k_hess: usize,
    pub intrinsic_dim: usize,
    pub metric: Metric,
    pub zscore: bool,
    /// Loss weight on labeled samples.
    pub w_large: f64,
    pub max_iter: usize,
    /// Relative objective change below which training stops.
    pub tol: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        let g = GraphConfig::default();
        TrainConfig {
            lambda: 1.0,
            gamma: 1.0,
            r: 2.0,
            k_graph: g.k_graph,
            k_hess: g.k_hess,
            intrinsic_dim: g.intrinsic_dim,
            metric: g.metric,
            zscore: g.zscore,
            w_large: 1e10,
            max_iter: 5,
            tol: 1e-4,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn graph_config(&self) -> GraphConfig {
        GraphConfig {
            k_graph: self.k_graph,
            k_hess: self.k_hess,
            intrinsic_dim: self.intrinsic_dim,
            metric: self.metric,
            zscore: self.zscore,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(GlccError::Param(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        positive("gamma", self.gamma)?;
        positive("w_large", self.w_large)?;
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(GlccError::Param(format!(
                "lambda must be non-negative, got {}",
                self.lambda
            )));
        }
        if !(self.r > 1.0 && self.r.is_finite()) {
            return Err(GlccError::Param(format!("r must exceed 1, got {}", self.r)));
        }
        if self.max_iter == 0 {
            return Err(GlccError::Param("max_iter must be at least 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(GlccError::Param(format!(
                "tol must be non-negative, got {}",
                self.tol
            )));
        }
        if self.k_graph == 0 {
            return Err(GlccError::Param("k_graph must be at least 1".into()));
        }
        if self.intrinsic_dim == 0 {
            return Err(GlccError::Param("intrinsic_dim must be at least 1".into()));
        }
        let need = min_hessian_neighbors(self.intrinsic_dim);
        if self.k_hess < need {
            return Err(GlccError::Param(format!(
                "k_hess={} is below the {need} neighbors needed for intrinsic_dim={}",
                self.k_hess, self.intrinsic_dim
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        TrainConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_out_of_range() {
        let bad = [
            TrainConfig {
                r: 1.0,
                ..Default::default()
            },
            TrainConfig {
                gamma: 0.0,
                ..Default::default()
            },
            TrainConfig {
                lambda: -1.0,
                ..Default::default()
            },
            TrainConfig {
                w_large: 0.0,
                ..Default::default()
            },
            TrainConfig {
                max_iter: 0,
                ..Default::default()
            },
            TrainConfig {
                k_hess: 5,
                intrinsic_dim: 2,
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(GlccError::Param(_))), "{c:?}");
        }
    }

    #[test]
    fn grid_values_above_one_are_accepted() {
        let c = TrainConfig {
            lambda: 1e4,
            gamma: 1e4,
            ..Default::default()
        };
        c.validate().unwrap();
    }
}
