//! Labeled-fraction sweeps, λ/γ grid searches and a supervised baseline.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{score, EvalReport};
use crate::data::{apply_split, LabeledSplit, MultiFeatureDataset, SplitSpec};
use crate::error::{GlccError, Result};
use crate::graphs::{build_graph_set, GraphSet};
use crate::linalg::{column_means, ridge_solve};
use crate::model::{predict, train, ConvergenceTrace, ModelParams, Prediction, TrainConfig};

/// Labeled fractions used by default in sweeps.
pub const DEFAULT_FRACTIONS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
/// Default λ and γ axes of the grid search.
pub const DEFAULT_GRID: [f64; 5] = [1e-4, 1e-2, 1.0, 1e2, 1e4];

/// Scores of the given rows of the training views.
pub fn predict_rows(
    params: &ModelParams,
    dataset: &MultiFeatureDataset,
    rows: &[usize],
) -> Result<Vec<Prediction>> {
    let cols: Vec<Vec<Vec<f64>>> = dataset
        .views()
        .iter()
        .map(|v| {
            rows.iter()
                .map(|&r| v.data.row(r).iter().copied().collect())
                .collect()
        })
        .collect();
    (0..rows.len())
        .map(|j| {
            let z: Vec<&[f64]> = cols.iter().map(|c| c[j].as_slice()).collect();
            predict(params, &z)
        })
        .collect()
}

/// Trains on a split and scores the predictor on its unlabeled samples.
pub fn train_and_score(
    split: &LabeledSplit,
    graphs: &GraphSet,
    config: &TrainConfig,
) -> Result<(EvalReport, ConvergenceTrace)> {
    let (params, trace) = train(&split.dataset, graphs, config)?;
    let held_out = split.unlabeled_indices();
    let preds = predict_rows(&params, &split.dataset, &held_out)?;
    let truth: Vec<usize> = held_out.iter().map(|&i| split.truth[i]).collect();
    Ok((score(&preds, &truth)?, trace))
}

/// Supervised ridge regression with an unpenalized intercept, fitted on the
/// labeled samples of one view only.
pub fn ridge_baseline(
    dataset: &MultiFeatureDataset,
    view: usize,
    gamma: f64,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let labeled: Vec<usize> = (0..dataset.n())
        .filter(|&i| dataset.labeled_mask()[i])
        .collect();
    if labeled.is_empty() {
        return Err(GlccError::NoSupervision);
    }
    let x = dataset.views()[view].data.select_rows(&labeled);
    let y = dataset.y().select_rows(&labeled);
    let x_mean = column_means(&x);
    let y_mean = column_means(&y);
    let mut xc = x.clone();
    for mut row in xc.row_iter_mut() {
        row -= x_mean.transpose();
    }
    let mut yc = y.clone();
    for mut row in yc.row_iter_mut() {
        row -= y_mean.transpose();
    }
    let p = ridge_solve(&xc, &yc, gamma)?;
    let b = y_mean - p.transpose() * x_mean;
    Ok((p, b))
}

/// Accuracy report of the single-view ridge baseline on the unlabeled samples.
pub fn score_ridge_baseline(split: &LabeledSplit, view: usize, gamma: f64) -> Result<EvalReport> {
    let (p, b) = ridge_baseline(&split.dataset, view, gamma)?;
    let held_out = split.unlabeled_indices();
    let x = &split.dataset.views()[view].data;
    let preds: Vec<Prediction> = held_out
        .iter()
        .map(|&i| {
            let s = p.transpose() * x.row(i).transpose() + &b;
            let scores: Vec<f64> = s.iter().copied().collect();
            Prediction {
                label: crate::model::argmax(&scores),
                scores,
            }
        })
        .collect();
    let truth: Vec<usize> = held_out.iter().map(|&i| split.truth[i]).collect();
    score(&preds, &truth)
}

/// Deterministic per-job seed.
pub fn derive_seed(base: u64, a: u64, b: u64) -> u64 {
    // splitmix64 finalizer over a combined key
    let mut z = base
        .wrapping_add(a.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(b.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub fractions: Vec<f64>,
    pub repeats: usize,
    pub seed: u64,
    pub stratified: bool,
    /// Also run the best single-view ridge baseline.
    pub baselines: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            fractions: DEFAULT_FRACTIONS.to_vec(),
            repeats: 5,
            seed: 0,
            stratified: true,
            baselines: true,
        }
    }
}

/// Method label used in sweep tables.
pub const METHOD_GLCC: &str = "glcc";
pub const METHOD_RIDGE: &str = "ridge-best-view";

/// One train/score run of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRun {
    pub fraction: f64,
    pub repeat: usize,
    pub split_seed: u64,
    pub method: String,
    pub accuracy: f64,
    pub map: f64,
    #[serde(skip)]
    pub trace: Option<ConvergenceTrace>,
}

/// Mean and population standard deviation per fraction and method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub fraction: f64,
    pub method: String,
    pub runs: usize,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
    pub map_mean: f64,
    pub map_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub runs: Vec<SweepRun>,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl SweepTable {
    pub fn row(&self, fraction: f64, method: &str) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.fraction == fraction && r.method == method)
    }

    pub fn to_delimited(&self) -> String {
        let mut out =
            String::from("fraction,method,runs,accuracy_mean,accuracy_std,map_mean,map_std\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.fraction,
                r.method,
                r.runs,
                r.accuracy_mean,
                r.accuracy_std,
                r.map_mean,
                r.map_std
            ));
        }
        out
    }
}

/// Runs every (fraction, repeat) job: split, train, score on the unlabeled
/// part. Graphs depend only on the features and are built once.
pub fn sweep_labeled_fraction(
    dataset: &MultiFeatureDataset,
    spec: &SweepSpec,
    config: &TrainConfig,
) -> Result<SweepTable> {
    if spec.fractions.is_empty() || spec.repeats == 0 {
        return Err(GlccError::Param(
            "a sweep needs at least one fraction and one repeat".into(),
        ));
    }
    if let Some(f) = spec.fractions.iter().find(|f| !(**f > 0.0 && **f < 1.0)) {
        return Err(GlccError::Param(format!(
            "sweep fraction {f} is outside (0, 1)"
        )));
    }
    config.validate()?;
    dataset.full_labels()?;
    let graphs = build_graph_set(dataset.views(), &config.graph_config())?;

    let jobs: Vec<(usize, usize)> = (0..spec.fractions.len())
        .flat_map(|f| (0..spec.repeats).map(move |r| (f, r)))
        .collect();
    let results: Vec<Result<Vec<SweepRun>>> = jobs
        .par_iter()
        .map(|&(fi, rep)| {
            let fraction = spec.fractions[fi];
            let ctx = |e: GlccError| e.context(format!("fraction {fraction}, repeat {rep}"));
            let split_seed = derive_seed(spec.seed, fi as u64, rep as u64);
            let split = apply_split(
                dataset,
                &SplitSpec {
                    labeled_fraction: fraction,
                    stratified: spec.stratified,
                    seed: split_seed,
                },
            )
            .map_err(ctx)?;
            let (report, trace) = train_and_score(&split, &graphs, config).map_err(ctx)?;
            let mut runs = vec![SweepRun {
                fraction,
                repeat: rep,
                split_seed,
                method: METHOD_GLCC.into(),
                accuracy: report.accuracy,
                map: report.map,
                trace: Some(trace),
            }];
            if spec.baselines {
                let mut best: Option<EvalReport> = None;
                for v in 0..dataset.m() {
                    let r = score_ridge_baseline(&split, v, config.gamma).map_err(ctx)?;
                    if best.as_ref().is_none_or(|b| r.accuracy > b.accuracy) {
                        best = Some(r);
                    }
                }
                let best = best.expect("at least one view");
                runs.push(SweepRun {
                    fraction,
                    repeat: rep,
                    split_seed,
                    method: METHOD_RIDGE.into(),
                    accuracy: best.accuracy,
                    map: best.map,
                    trace: None,
                });
            }
            Ok(runs)
        })
        .collect();

    let mut runs = Vec::new();
    for r in results {
        runs.extend(r?);
    }
    let mut methods = vec![METHOD_GLCC];
    if spec.baselines {
        methods.push(METHOD_RIDGE);
    }
    let mut rows = Vec::new();
    for &fraction in &spec.fractions {
        for method in &methods {
            let sel: Vec<&SweepRun> = runs
                .iter()
                .filter(|r| r.fraction == fraction && r.method == *method)
                .collect();
            let acc: Vec<f64> = sel.iter().map(|r| r.accuracy).collect();
            let map: Vec<f64> = sel.iter().map(|r| r.map).collect();
            let (am, asd) = mean_std(&acc);
            let (mm, msd) = mean_std(&map);
            rows.push(SweepRow {
                fraction,
                method: method.to_string(),
                runs: sel.len(),
                accuracy_mean: am,
                accuracy_std: asd,
                map_mean: mm,
                map_std: msd,
            });
        }
    }
    Ok(SweepTable { rows, runs })
}

/// Which report field the grid search maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridMetric {
    #[default]
    Accuracy,
    Map,
}

impl GridMetric {
    pub fn of(self, r: &EvalReport) -> f64 {
        match self {
            GridMetric::Accuracy => r.accuracy,
            GridMetric::Map => r.map,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub lambdas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub split: SplitSpec,
    pub metric: GridMetric,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            lambdas: DEFAULT_GRID.to_vec(),
            gammas: DEFAULT_GRID.to_vec(),
            split: SplitSpec {
                labeled_fraction: 0.3,
                ..Default::default()
            },
            metric: GridMetric::Accuracy,
        }
    }
}

/// Full λ × γ grid of held-out scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub lambdas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub metric: GridMetric,
    /// `reports[i][j]` for `lambdas[i]`, `gammas[j]`.
    pub reports: Vec<Vec<EvalReport>>,
    /// Indices `(i, j)` of the best cell.
    pub best: (usize, usize),
}

impl GridResult {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.metric.of(&self.reports[i][j])
    }

    pub fn to_delimited(&self) -> String {
        let mut out = String::from("lambda,gamma,accuracy,map\n");
        for (i, l) in self.lambdas.iter().enumerate() {
            for (j, g) in self.gammas.iter().enumerate() {
                let r = &self.reports[i][j];
                out.push_str(&format!("{l},{g},{},{}\n", r.accuracy, r.map));
            }
        }
        out
    }
}

/// Grid search evaluating cells in row-major order.
pub fn grid_search(
    dataset: &MultiFeatureDataset,
    spec: &GridSpec,
    config: &TrainConfig,
) -> Result<GridResult> {
    let order: Vec<(usize, usize)> = (0..spec.lambdas.len())
        .flat_map(|i| (0..spec.gammas.len()).map(move |j| (i, j)))
        .collect();
    grid_search_in_order(dataset, spec, config, &order)
}

/// Grid search evaluating cells in the given order. The result does not
/// depend on the order.
pub fn grid_search_in_order(
    dataset: &MultiFeatureDataset,
    spec: &GridSpec,
    config: &TrainConfig,
    order: &[(usize, usize)],
) -> Result<GridResult> {
    let (nl, ng) = (spec.lambdas.len(), spec.gammas.len());
    if nl == 0 || ng == 0 {
        return Err(GlccError::Param("grid axes must not be empty".into()));
    }
    let mut covered = vec![false; nl * ng];
    for &(i, j) in order {
        if i >= nl || j >= ng || std::mem::replace(&mut covered[i * ng + j], true) {
            return Err(GlccError::Param(
                "cell order must visit every grid cell once".into(),
            ));
        }
    }
    if covered.iter().any(|c| !c) {
        return Err(GlccError::Param(
            "cell order must visit every grid cell once".into(),
        ));
    }
    config.validate()?;
    let split = apply_split(dataset, &spec.split)?;
    let graphs = build_graph_set(dataset.views(), &config.graph_config())?;

    let evaluated: Vec<((usize, usize), Result<EvalReport>)> = order
        .par_iter()
        .map(|&(i, j)| {
            let cell = TrainConfig {
                lambda: spec.lambdas[i],
                gamma: spec.gammas[j],
                ..config.clone()
            };
            let res = train_and_score(&split, &graphs, &cell)
                .map(|(r, _)| r)
                .map_err(|e| {
                    e.context(format!("cell lambda={} gamma={}", cell.lambda, cell.gamma))
                });
            ((i, j), res)
        })
        .collect();
    let mut slots: Vec<Vec<Option<EvalReport>>> = vec![vec![None; ng]; nl];
    for ((i, j), res) in evaluated {
        slots[i][j] = Some(res?);
    }
    let reports: Vec<Vec<EvalReport>> = slots
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|c| c.expect("every cell evaluated"))
                .collect()
        })
        .collect();

    let mut best = (0, 0);
    for i in 0..nl {
        for j in 0..ng {
            let (bi, bj) = best;
            let v = spec.metric.of(&reports[i][j]);
            let bv = spec.metric.of(&reports[bi][bj]);
            let smaller = (spec.lambdas[i], spec.gammas[j]) < (spec.lambdas[bi], spec.gammas[bj]);
            if v > bv || (v == bv && smaller) {
                best = (i, j);
            }
        }
    }
    Ok(GridResult {
        lambdas: spec.lambdas.clone(),
        gammas: spec.gammas.clone(),
        metric: spec.metric,
        reports,
        best,
    })
}
