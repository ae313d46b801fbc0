//! Scoring and experiment drivers.

mod experiment;
mod metrics;

pub use experiment::{
    derive_seed, grid_search, grid_search_in_order, predict_rows, ridge_baseline,
    score_ridge_baseline, sweep_labeled_fraction, train_and_score, GridMetric, GridResult,
    GridSpec, SweepRow, SweepRun, SweepSpec, SweepTable, DEFAULT_FRACTIONS, DEFAULT_GRID,
    METHOD_GLCC, METHOD_RIDGE,
};
pub use metrics::{average_precision, score, EvalReport};

use serde::Serialize;

pub const SUMMARY_FORMAT: &str = "glcc-summary";
pub const SUMMARY_VERSION: u32 = 1;

#[derive(Serialize)]
struct Summary<'a, T: Serialize> {
    format: &'static str,
    version: u32,
    kind: &'a str,
    body: &'a T,
}

/// Structured summary document: a JSON object carrying `format`, `version`,
/// a `kind` tag and the serialized `body`.
pub fn summary_json<T: Serialize>(kind: &str, body: &T) -> String {
    serde_json::to_string_pretty(&Summary {
        format: SUMMARY_FORMAT,
        version: SUMMARY_VERSION,
        kind,
        body,
    })
    .expect("summary serializes")
}
