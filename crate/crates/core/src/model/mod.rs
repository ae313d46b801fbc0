//! The training objective, its closed-form block updates, the alternating
//! trainer and the joint predictor.

mod config;
mod file;
mod objective;
mod params;
mod predict;
mod train;
mod updates;

pub use config::TrainConfig;
pub use file::{TrainedModel, MODEL_FORMAT, MODEL_VERSION};
pub use objective::{objective, objective_rounding_bound, objective_terms, ObjectiveTerms};
pub use params::{group_graph, ModelParams, SelectionMatrix};
pub use predict::{argmax, predict, predict_batch, Prediction};
pub use train::{train, ConvergenceTrace, Step, Trainer, MONOTONE_SLACK};
pub use updates::{
    init_f, simplex_weights, update_b, update_f, update_p, update_weights, TRACE_GUARD,
};
