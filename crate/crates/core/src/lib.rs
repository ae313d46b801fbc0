//! Semi-supervised multi-feature classification with a globally consistent
//! label matrix.
//!
//! Every feature view contributes a k-NN graph Laplacian and a Hessian energy
//! matrix built from its training samples. Training alternates closed-form
//! updates of per-view linear sub-classifiers, a shared predicted-label
//! matrix and per-view graph weights. A new sample is classified by summing
//! the sub-classifier scores of all its views.
//!
//! ```
//! use glcc::data::{apply_split, generate_synthetic, SplitSpec, SyntheticSpec};
//! use glcc::graphs::build_graph_set;
//! use glcc::model::{predict_batch, train, TrainConfig};
//!
//! let data = generate_synthetic(&SyntheticSpec { n: 60, ..Default::default() })?;
//! let split = apply_split(&data, &SplitSpec { labeled_fraction: 0.2, stratified: true, seed: 1 })?;
//! let config = TrainConfig::default();
//! let graphs = build_graph_set(split.dataset.views(), &config.graph_config())?;
//! let (params, trace) = train(&split.dataset, &graphs, &config)?;
//! assert!(trace.objective.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-8)));
//!
//! let views: Vec<_> = data.views().iter().map(|v| v.data.clone()).collect();
//! let predictions = predict_batch(&params, &views)?;
//! assert_eq!(predictions.len(), 60);
//! # Ok::<(), glcc::GlccError>(())
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod eval;
pub mod graphs;
pub mod linalg;
pub mod model;
pub mod sparse;

pub use error::{ErrorKind, GlccError, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/hessian.md")]
    mod hessian {}
    #[doc = include_str!("../../../book/src/training.md")]
    mod training {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
}
