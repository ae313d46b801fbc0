use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::MultiFeatureDataset;
use crate::error::{GlccError, Result};

/// How many samples keep their labels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSpec {
    pub labeled_fraction: f64,
    pub stratified: bool,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            labeled_fraction: 0.1,
            stratified: true,
            seed: 0,
        }
    }
}

/// A partially labeled copy of a dataset plus the full ground truth.
#[derive(Debug, Clone)]
pub struct LabeledSplit {
    pub dataset: MultiFeatureDataset,
    pub truth: Vec<usize>,
}

impl LabeledSplit {
    /// Indices whose labels were hidden.
    pub fn unlabeled_indices(&self) -> Vec<usize> {
        (0..self.dataset.n())
            .filter(|&i| !self.dataset.labeled_mask()[i])
            .collect()
    }
}

/// `⌈fraction · count⌉`, ignoring float noise just above an integer.
pub fn labeled_count(fraction: f64, count: usize) -> usize {
    let raw = fraction * count as f64;
    ((raw - 1e-9 * raw.max(1.0)).ceil().max(0.0) as usize).min(count)
}

/// Hides labels so that only a fraction of samples stay labeled.
///
/// Non-stratified splits keep `⌈f·n⌉` samples; stratified splits keep
/// `⌈f·n_c⌉` samples of every class `c`.
pub fn apply_split(dataset: &MultiFeatureDataset, spec: &SplitSpec) -> Result<LabeledSplit> {
    let f = spec.labeled_fraction;
    if !(f > 0.0 && f <= 1.0) {
        return Err(GlccError::Param(format!(
            "labeled_fraction must lie in (0, 1], got {f}"
        )));
    }
    let truth = dataset.full_labels()?;
    let n = dataset.n();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut keep = vec![false; n];

    if spec.stratified {
        for class in 0..dataset.c() {
            let mut members: Vec<usize> = (0..n).filter(|&i| truth[i] == class).collect();
            let take = labeled_count(f, members.len());
            if take == 0 {
                return Err(GlccError::Param(format!(
                    "class '{}' would have no labeled samples at fraction {f}",
                    dataset.class_names()[class]
                )));
            }
            members.shuffle(&mut rng);
            for &i in &members[..take] {
                keep[i] = true;
            }
        }
    } else {
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        for &i in &all[..labeled_count(f, n)] {
            keep[i] = true;
        }
    }

    let labels: Vec<Option<usize>> = (0..n).map(|i| keep[i].then_some(truth[i])).collect();
    Ok(LabeledSplit {
        dataset: dataset.with_labels(&labels)?,
        truth,
    })
}
