//! Synthetic multi-view datasets.
//!
//! Class structure lives on a two-dimensional latent plane (Gaussian blobs or
//! a chain of interleaved half-circle arcs). Each view is a separate random
//! linear embedding of the latent points into its own feature dimension, plus
//! independent Gaussian noise, so views agree on the manifold but carry
//! complementary noise.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::dataset::{FeatureView, MultiFeatureDataset};
use crate::error::{GlccError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Manifold {
    /// Isotropic blobs centered on a circle of radius 4.
    Gaussian,
    /// Interleaved half circles of unit radius (two moons for `c = 2`).
    Arcs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n: usize,
    pub m: usize,
    pub c: usize,
    pub manifold: Manifold,
    /// Standard deviation of the latent jitter (blob spread for Gaussian).
    pub latent_noise: f64,
    /// Standard deviation of the per-view additive feature noise.
    pub view_noise: f64,
    /// Feature dimension per view; empty means `20 + 10·i` for view `i`.
    pub view_dims: Vec<usize>,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n: 200,
            m: 2,
            c: 2,
            manifold: Manifold::Arcs,
            latent_noise: 0.1,
            view_noise: 0.5,
            view_dims: Vec::new(),
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn dims(&self) -> Vec<usize> {
        if self.view_dims.is_empty() {
            (0..self.m).map(|i| 20 + 10 * i).collect()
        } else {
            self.view_dims.clone()
        }
    }
}

fn latent_point(manifold: Manifold, class: usize, c: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
    match manifold {
        Manifold::Gaussian => {
            let angle = 2.0 * PI * class as f64 / c as f64;
            (4.0 * angle.cos(), 4.0 * angle.sin())
        }
        Manifold::Arcs => {
            let theta = rng.random_range(0.0..PI);
            let (sign, lift) = if class.is_multiple_of(2) {
                (1.0, 0.0)
            } else {
                (-1.0, 0.5)
            };
            (1.2 * class as f64 + theta.cos(), lift + sign * theta.sin())
        }
    }
}

/// Generates a fully labeled synthetic dataset. Sample `j` belongs to class
/// `j mod c`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<MultiFeatureDataset> {
    if spec.c < 1 || spec.n < 4 * spec.c {
        return Err(GlccError::Param(format!(
            "synthetic data needs n >= 4c (n={}, c={})",
            spec.n, spec.c
        )));
    }
    if spec.m < 1 {
        return Err(GlccError::Param(
            "synthetic data needs at least one view".into(),
        ));
    }
    let dims = spec.dims();
    if dims.len() != spec.m || dims.contains(&0) {
        return Err(GlccError::Param(format!(
            "view_dims must list {} positive dimensions, got {:?}",
            spec.m, dims
        )));
    }
    if !(spec.latent_noise >= 0.0 && spec.view_noise >= 0.0) {
        return Err(GlccError::Param("noise levels must be non-negative".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut latent = DMatrix::zeros(spec.n, 2);
    let mut labels = Vec::with_capacity(spec.n);
    for j in 0..spec.n {
        let class = j % spec.c;
        let (a, b) = latent_point(spec.manifold, class, spec.c, &mut rng);
        let ja: f64 = rng.sample(StandardNormal);
        let jb: f64 = rng.sample(StandardNormal);
        latent[(j, 0)] = a + spec.latent_noise * ja;
        latent[(j, 1)] = b + spec.latent_noise * jb;
        labels.push(Some(class));
    }

    let mut views = Vec::with_capacity(spec.m);
    for (v, &d) in dims.iter().enumerate() {
        let embed = DMatrix::from_fn(2, d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let offset: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let mut x = &latent * embed;
        for i in 0..spec.n {
            for k in 0..d {
                let noise: f64 = rng.sample(StandardNormal);
                x[(i, k)] += offset[k] + spec.view_noise * noise;
            }
        }
        views.push(FeatureView::new(format!("view{v}"), x));
    }
    let class_names = (0..spec.c).map(|k| format!("class{k}")).collect();
    MultiFeatureDataset::new(views, &labels, class_names)
}
