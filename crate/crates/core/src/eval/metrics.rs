use serde::{Deserialize, Serialize};

use crate::error::{GlccError, Result};
use crate::model::Prediction;

/// Accuracy, ranking quality and confusion counts of a set of predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    /// Mean of the defined per-class average precisions.
    pub map: f64,
    /// `None` for classes with no sample in the truth.
    pub per_class_ap: Vec<Option<f64>>,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub n_test: usize,
}

impl EvalReport {
    /// Checks the relations between accuracy, confusion and MAP.
    pub fn is_consistent(&self) -> bool {
        let total: usize = self.confusion.iter().flatten().sum();
        let diag: usize = (0..self.confusion.len())
            .map(|k| self.confusion[k][k])
            .sum();
        let defined: Vec<f64> = self.per_class_ap.iter().flatten().copied().collect();
        let map = if defined.is_empty() {
            0.0
        } else {
            defined.iter().sum::<f64>() / defined.len() as f64
        };
        total == self.n_test
            && (self.accuracy - diag as f64 / self.n_test as f64).abs() < 1e-12
            && defined.iter().all(|ap| (0.0..=1.0).contains(ap))
            && (self.map - map).abs() < 1e-12
    }
}

/// Average precision of one ranking: samples are ordered by decreasing
/// `scores`, ties by increasing sample index, and precision is averaged at
/// the rank of every relevant sample. `None` without relevant samples.
pub fn average_precision(scores: &[f64], relevant: &[bool]) -> Option<f64> {
    let positives = relevant.iter().filter(|&&r| r).count();
    if positives == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (rank, &i) in order.iter().enumerate() {
        if relevant[i] {
            hits += 1;
            sum += hits as f64 / (rank + 1) as f64;
        }
    }
    Some(sum / positives as f64)
}

/// Scores predictions against ground-truth class indices.
pub fn score(predictions: &[Prediction], truth: &[usize]) -> Result<EvalReport> {
    if predictions.is_empty() {
        return Err(GlccError::Data("cannot score an empty test set".into()));
    }
    if predictions.len() != truth.len() {
        return Err(GlccError::Data(format!(
            "{} predictions for {} ground-truth labels",
            predictions.len(),
            truth.len()
        )));
    }
    let c = predictions[0].scores.len();
    if let Some(p) = predictions
        .iter()
        .find(|p| p.scores.len() != c || p.label >= c)
    {
        return Err(GlccError::Data(format!(
            "prediction with {} scores and label {} does not match {c} classes",
            p.scores.len(),
            p.label
        )));
    }
    if let Some(&t) = truth.iter().find(|&&t| t >= c) {
        return Err(GlccError::Data(format!(
            "true class {t} out of range for {c} classes"
        )));
    }

    let n = truth.len();
    let mut confusion = vec![vec![0usize; c]; c];
    for (p, &t) in predictions.iter().zip(truth) {
        confusion[t][p.label] += 1;
    }
    let correct: usize = (0..c).map(|k| confusion[k][k]).sum();

    let per_class_ap: Vec<Option<f64>> = (0..c)
        .map(|k| {
            let s: Vec<f64> = predictions.iter().map(|p| p.scores[k]).collect();
            let rel: Vec<bool> = truth.iter().map(|&t| t == k).collect();
            average_precision(&s, &rel)
        })
        .collect();
    let defined: Vec<f64> = per_class_ap.iter().flatten().copied().collect();
    let map = defined.iter().sum::<f64>() / defined.len() as f64;

    Ok(EvalReport {
        accuracy: correct as f64 / n as f64,
        map,
        per_class_ap,
        confusion,
        n_test: n,
    })
}
