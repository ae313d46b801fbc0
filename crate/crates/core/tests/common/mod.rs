//! Independent reference computations used to check the library.
//!
//! Everything here is written against dense `nalgebra` matrices with the most
//! direct formula available (explicit double sums, LU solves, brute-force
//! searches) and deliberately shares no code with the implementation paths
//! it checks.
#![allow(dead_code)]

use glcc::data::{FeatureView, MultiFeatureDataset};
use glcc::graphs::{build_graph_set, GraphConfig, GraphSet};
use glcc::model::{ModelParams, TrainConfig};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn randn(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

/// k nearest neighbors by full sort of all pairwise distances, ties by index.
pub fn brute_knn(x: &DMatrix<f64>, k: usize) -> Vec<Vec<usize>> {
    let n = x.nrows();
    (0..n)
        .map(|i| {
            let mut all: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| ((x.row(i) - x.row(j)).norm_squared(), j))
                .collect();
            all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            all.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect()
}

/// Dense symmetrized adjacency from neighbor lists.
pub fn dense_adjacency(n: usize, nn: &[Vec<usize>]) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n, n);
    for (i, list) in nn.iter().enumerate() {
        for &j in list {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
    }
    a
}

/// `Σ_i Σ_j A_ij ‖f_i − f_j‖²` by explicit double sum.
pub fn pairwise_smoothness(a: &DMatrix<f64>, f: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if a[(i, j)] != 0.0 {
                s += a[(i, j)] * (f.row(i) - f.row(j)).norm_squared();
            }
        }
    }
    s
}

/// Dense LU solve.
pub fn lu_solve(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.clone()
        .full_piv_lu()
        .solve(b)
        .expect("oracle system is nonsingular")
}

pub fn dense_group_graph(graphs: &GraphSet, alpha: &[f64], beta: &[f64], r: f64) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(graphs.n, graphs.n);
    for (i, v) in graphs.views.iter().enumerate() {
        g += v.laplacian.matrix().to_dense() * alpha[i].powf(r);
        g += v.hessian.matrix().to_dense() * beta[i].powf(r);
    }
    g
}

/// Objective evaluated term by term with dense matrices.
pub fn dense_objective(
    data: &MultiFeatureDataset,
    graphs: &GraphSet,
    params: &ModelParams,
    config: &TrainConfig,
) -> f64 {
    let f = params.f.as_ref().unwrap();
    let n = data.n();
    let ones = DMatrix::from_element(n, 1, 1.0);
    let mut total = 0.0;
    for (i, v) in data.views().iter().enumerate() {
        let bias = &ones * params.b[i].transpose();
        total += (f - &v.data * &params.p[i] - bias).norm_squared();
        total += config.gamma * params.p[i].norm_squared();
    }
    let w = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        data.labeled_mask()
            .iter()
            .map(|&l| if l { config.w_large } else { 0.0 }),
    ));
    let diff = f - data.y();
    total += (diff.transpose() * w * &diff).trace();
    let g = dense_group_graph(graphs, &params.alpha, &params.beta, config.r);
    total += config.lambda * (f.transpose() * g * f).trace();
    total
}

/// Ridge regression with an unpenalized intercept via the augmented normal
/// equations `[XᵀX+γI, Xᵀ1; 1ᵀX, n] [P; b] = [XᵀY; 1ᵀY]`.
pub fn ridge_with_bias(
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    gamma: f64,
) -> (DMatrix<f64>, DVector<f64>) {
    let (n, d) = x.shape();
    let mut aug = DMatrix::from_element(n, d + 1, 1.0);
    aug.view_mut((0, 0), (n, d)).copy_from(x);
    let mut lhs = aug.transpose() * &aug;
    for k in 0..d {
        lhs[(k, k)] += gamma;
    }
    let sol = lu_solve(&lhs, &(aug.transpose() * y));
    let p = sol.rows(0, d).into_owned();
    let b = sol.row(d).transpose();
    (p, b)
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut css = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        css += uk;
        let t = (css - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Minimizes `Σ w_i^r t_i` over the simplex by projected gradient descent
/// with backtracking, started from the uniform point.
pub fn projected_gradient_weights(traces: &[f64], r: f64) -> Vec<f64> {
    let m = traces.len();
    let obj = |w: &[f64]| -> f64 {
        w.iter()
            .zip(traces)
            .map(|(a, t)| a.max(0.0).powf(r) * t)
            .sum()
    };
    let mut w = vec![1.0 / m as f64; m];
    let mut step = 1.0 / traces.iter().cloned().fold(1e-300, f64::max);
    for _ in 0..200_000 {
        let grad: Vec<f64> = w
            .iter()
            .zip(traces)
            .map(|(a, t)| r * a.max(0.0).powf(r - 1.0) * t)
            .collect();
        let f0 = obj(&w);
        let mut s = step * 2.0;
        let next = loop {
            let cand: Vec<f64> = w.iter().zip(&grad).map(|(a, g)| a - s * g).collect();
            let cand = project_simplex(&cand);
            let dec: f64 = w
                .iter()
                .zip(&cand)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
            if obj(&cand) <= f0 - dec / (2.0 * s) || s < 1e-300 {
                break cand;
            }
            s *= 0.5;
        };
        step = s;
        let moved: f64 = w.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        w = next;
        if moved < 1e-15 {
            break;
        }
    }
    w
}

/// Random multi-view instance with a random labeled subset containing at
/// least one sample.
pub fn random_instance(
    seed: u64,
    n: usize,
    m: usize,
    c: usize,
    labeled_fraction: f64,
) -> MultiFeatureDataset {
    let mut r = rng(seed);
    let views = (0..m)
        .map(|i| {
            let d = 2 + r.random_range(0..5usize);
            FeatureView::new(format!("v{i}"), randn(&mut r, n, d))
        })
        .collect();
    let mut labels: Vec<Option<usize>> = (0..n)
        .map(|_| {
            let class = r.random_range(0..c);
            (r.random::<f64>() < labeled_fraction).then_some(class)
        })
        .collect();
    if labels.iter().all(|l| l.is_none()) {
        labels[0] = Some(0);
    }
    MultiFeatureDataset::new(views, &labels, (0..c).map(|k| format!("c{k}")).collect()).unwrap()
}

/// Small graph settings that fit any view with at least 12 samples.
pub fn small_graph_config(intrinsic_dim: usize) -> GraphConfig {
    GraphConfig {
        k_graph: 5,
        k_hess: glcc::graphs::min_hessian_neighbors(intrinsic_dim) + 3,
        intrinsic_dim,
        ..Default::default()
    }
}

pub fn graphs_for(data: &MultiFeatureDataset, cfg: &GraphConfig) -> GraphSet {
    build_graph_set(data.views(), cfg).unwrap()
}

pub fn config_with(graph: &GraphConfig, lambda: f64, gamma: f64) -> TrainConfig {
    TrainConfig {
        lambda,
        gamma,
        k_graph: graph.k_graph,
        k_hess: graph.k_hess,
        intrinsic_dim: graph.intrinsic_dim,
        ..Default::default()
    }
}
