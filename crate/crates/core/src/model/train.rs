use nalgebra::DMatrix;
use rayon::prelude::*;

use super::config::TrainConfig;
use super::objective::{check_shapes, objective, objective_rounding_bound};
use super::params::{ModelParams, SelectionMatrix};
use super::updates::{init_f, update_b, update_f, update_p, update_weights};
use crate::data::MultiFeatureDataset;
use crate::error::{GlccError, Result};
use crate::graphs::GraphSet;

/// Relative slack allowed before an objective increase is reported, on top
/// of the rounding bounds of both evaluations.
pub const MONOTONE_SLACK: f64 = 1e-8;
const CONVERGENCE_FLOOR: f64 = 1e-300;

/// Block updates in the order one iteration applies them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    SubClassifiers,
    Biases,
    Labels,
    Weights,
}

impl Step {
    pub const ORDER: [Step; 4] = [
        Step::SubClassifiers,
        Step::Biases,
        Step::Labels,
        Step::Weights,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Step::SubClassifiers => "update_p",
            Step::Biases => "update_b",
            Step::Labels => "update_f",
            Step::Weights => "update_weights",
        }
    }
}

/// Objective value and sub-classifier movement per iteration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceTrace {
    /// `objective[0]` is the value after initialization, `objective[t]`
    /// after iteration `t`.
    pub objective: Vec<f64>,
    /// `delta_p[t - 1] = Σ_i ‖P_i^t − P_i^{t−1}‖_F` for iteration `t`.
    pub delta_p: Vec<f64>,
    /// Whether the relative-change criterion fired before `max_iter`.
    pub converged: bool,
}

impl ConvergenceTrace {
    pub fn iterations(&self) -> usize {
        self.delta_p.len()
    }

    /// `|J_t − J_{t−1}| / max(J_{t−1}, ε)` for iteration `t >= 1`.
    pub fn relative_change(&self, t: usize) -> f64 {
        let prev = self.objective[t - 1];
        (self.objective[t] - prev).abs() / prev.abs().max(CONVERGENCE_FLOOR)
    }

    /// Delimited text with header `iteration,objective,delta_p`. Row 0 is
    /// the initialization and carries a zero `delta_p`.
    pub fn to_delimited(&self) -> String {
        let mut out = String::from("iteration,objective,delta_p\n");
        for (t, j) in self.objective.iter().enumerate() {
            let dp = if t == 0 { 0.0 } else { self.delta_p[t - 1] };
            out.push_str(&format!("{t},{j},{dp}\n"));
        }
        out
    }
}

/// Alternating minimizer with the state exposed between block updates.
pub struct Trainer<'a> {
    dataset: &'a MultiFeatureDataset,
    graphs: &'a GraphSet,
    config: TrainConfig,
    w: SelectionMatrix,
    params: ModelParams,
}

impl<'a> Trainer<'a> {
    /// Sets uniform weights, zero sub-classifiers and biases, and the
    /// initial label matrix.
    pub fn new(
        dataset: &'a MultiFeatureDataset,
        graphs: &'a GraphSet,
        config: &TrainConfig,
    ) -> Result<Self> {
        config.validate()?;
        if dataset.num_labeled() == 0 {
            return Err(GlccError::NoSupervision);
        }
        let mut params = ModelParams::initial(&dataset.dims(), dataset.c());
        let w = SelectionMatrix::new(dataset.labeled_mask(), config.w_large);
        let placeholder = DMatrix::zeros(dataset.n(), dataset.c());
        check_shapes(dataset, graphs, &params, &placeholder)?;
        params.f = Some(init_f(graphs, dataset.y(), &w, config)?);
        Ok(Trainer {
            dataset,
            graphs,
            config: config.clone(),
            w,
            params,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn objective(&self) -> Result<f64> {
        objective(self.dataset, self.graphs, &self.params, &self.config)
    }

    /// Rounding-error bound of [`Trainer::objective`] at the current state.
    pub fn rounding_bound(&self) -> Result<f64> {
        objective_rounding_bound(self.dataset, self.graphs, &self.params, &self.config)
    }

    fn f(&self) -> &DMatrix<f64> {
        self.params.f.as_ref().expect("trainer always holds F")
    }

    /// Applies one block update.
    pub fn step(&mut self, step: Step) -> Result<()> {
        match step {
            Step::SubClassifiers => {
                let f = self.f();
                let gamma = self.config.gamma;
                let new_p: Vec<Result<DMatrix<f64>>> = self
                    .dataset
                    .views()
                    .par_iter()
                    .zip(self.params.b.par_iter())
                    .map(|(v, b)| update_p(&v.data, f, b, gamma))
                    .collect();
                self.params.p = new_p.into_iter().collect::<Result<_>>()?;
            }
            Step::Biases => {
                let f = self.f();
                let new_b = self
                    .dataset
                    .views()
                    .iter()
                    .zip(&self.params.p)
                    .map(|(v, p)| update_b(&v.data, f, p))
                    .collect();
                self.params.b = new_b;
            }
            Step::Labels => {
                let f = update_f(
                    self.dataset,
                    self.graphs,
                    &self.params,
                    &self.w,
                    self.dataset.y(),
                    &self.config,
                )?;
                self.params.f = Some(f);
            }
            Step::Weights => {
                let (alpha, beta) = update_weights(self.f(), self.graphs, self.config.r)?;
                self.params.alpha = alpha;
                self.params.beta = beta;
            }
        }
        Ok(())
    }

    /// Runs one full iteration, checking after every block that the
    /// objective did not go up. Returns the new objective and `ΔP`.
    pub fn iterate(&mut self, iteration: usize, mut current: f64) -> Result<(f64, f64)> {
        let previous_p = self.params.p.clone();
        let mut current_bound = self.rounding_bound()?;
        for step in Step::ORDER {
            self.step(step)?;
            let next = self.objective()?;
            let next_bound = self.rounding_bound()?;
            let slack = MONOTONE_SLACK * current.abs().max(1e-12) + current_bound + next_bound;
            if next > current + slack {
                return Err(GlccError::ObjectiveIncrease {
                    iteration,
                    step: step.name(),
                    before: current,
                    after: next,
                });
            }
            current = next;
            current_bound = next_bound;
        }
        let delta_p = previous_p
            .iter()
            .zip(&self.params.p)
            .map(|(a, b)| (b - a).norm())
            .sum();
        Ok((current, delta_p))
    }

    /// Iterates until the relative objective change drops below `tol` or
    /// `max_iter` iterations have run.
    pub fn run(mut self) -> Result<(ModelParams, ConvergenceTrace)> {
        let mut trace = ConvergenceTrace {
            objective: vec![self.objective()?],
            ..Default::default()
        };
        for t in 1..=self.config.max_iter {
            let (j, dp) = self.iterate(t, trace.objective[t - 1])?;
            trace.objective.push(j);
            trace.delta_p.push(dp);
            if trace.relative_change(t) < self.config.tol {
                trace.converged = true;
                break;
            }
        }
        Ok((self.params, trace))
    }
}

/// Trains the classifier on a partially labeled dataset.
pub fn train(
    dataset: &MultiFeatureDataset,
    graphs: &GraphSet,
    config: &TrainConfig,
) -> Result<(ModelParams, ConvergenceTrace)> {
    Trainer::new(dataset, graphs, config)?.run()
}
