mod common;

use common::*;
use glcc::data::{apply_split, generate_synthetic, SplitSpec, SyntheticSpec};
use glcc::eval::{
    average_precision, grid_search, grid_search_in_order, score, summary_json,
    sweep_labeled_fraction, train_and_score, GridMetric, GridSpec, SweepSpec, DEFAULT_FRACTIONS,
    DEFAULT_GRID, METHOD_GLCC, METHOD_RIDGE,
};
use glcc::graphs::build_graph_set;
use glcc::model::{argmax, Prediction, TrainConfig};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn pred(scores: &[f64]) -> Prediction {
    Prediction {
        label: argmax(scores),
        scores: scores.to_vec(),
    }
}

/// AP by the textbook definition: for each relevant sample, the fraction of
/// relevant samples among those ranked at or above it.
fn ap_oracle(scores: &[f64], relevant: &[bool]) -> Option<f64> {
    let n = scores.len();
    let above = |i: usize, j: usize| scores[j] > scores[i] || (scores[j] == scores[i] && j <= i);
    let pos: Vec<usize> = (0..n).filter(|&i| relevant[i]).collect();
    if pos.is_empty() {
        return None;
    }
    let total: f64 = pos
        .iter()
        .map(|&i| {
            let rank = (0..n).filter(|&j| above(i, j)).count();
            let hits = pos.iter().filter(|&&j| above(i, j)).count();
            hits as f64 / rank as f64
        })
        .sum();
    Some(total / pos.len() as f64)
}

#[test]
fn perfect_predictions_score_one() {
    let preds = vec![pred(&[0.9, 0.1]), pred(&[0.2, 0.8]), pred(&[0.7, 0.3])];
    let r = score(&preds, &[0, 1, 0]).unwrap();
    assert_eq!((r.accuracy, r.map), (1.0, 1.0));
    assert_eq!(r.confusion, vec![vec![2, 0], vec![0, 1]]);
    assert!(r.is_consistent());
}

#[test]
fn hand_computed_ranking() {
    let ap = average_precision(&[0.9, 0.8, 0.3, 0.1], &[true, false, true, false]).unwrap();
    assert!((ap - 5.0 / 6.0).abs() < 1e-15);
}

#[test]
fn tied_scores_follow_index_order() {
    // With every score tied, the ranking is the sample order.
    let relevant = [false, true, true, false, true, false];
    let ap = average_precision(&[0.5; 6], &relevant).unwrap();
    let want = (1.0 / 2.0 + 2.0 / 3.0 + 3.0 / 5.0) / 3.0;
    assert!((ap - want).abs() < 1e-15);
    assert_eq!(ap, ap_oracle(&[0.5; 6], &relevant).unwrap());

    // A fully tied ranking does not score the prevalence in general: the
    // value depends on where the positives sit in index order.
    let front = average_precision(&[1.0; 4], &[true, true, false, false]).unwrap();
    let back = average_precision(&[1.0; 4], &[false, false, true, true]).unwrap();
    assert_eq!(front, 1.0);
    assert!((back - (1.0 / 3.0 + 2.0 / 4.0) / 2.0).abs() < 1e-15);
    assert_eq!(average_precision(&[1.0, 2.0], &[false, false]), None);
}

#[test]
fn absent_classes_are_left_out_of_the_mean() {
    let preds = vec![pred(&[0.9, 0.1, 0.0]), pred(&[0.2, 0.8, 0.0])];
    let r = score(&preds, &[0, 1]).unwrap();
    assert_eq!(r.per_class_ap[2], None);
    assert_eq!(r.map, 1.0);
    assert!(r.is_consistent());
}

#[test]
fn scoring_rejects_bad_input() {
    assert!(score(&[], &[]).is_err());
    assert!(score(&[pred(&[1.0, 0.0])], &[0, 1]).is_err());
    assert!(score(&[pred(&[1.0, 0.0])], &[2]).is_err());
}

#[test]
fn random_scores_give_chance_precision() {
    for seed in 0..20 {
        let mut r = rng(seed);
        let scores: Vec<f64> = (0..200).map(|_| r.random()).collect();
        let relevant: Vec<bool> = (0..200).map(|i| i % 2 == 0).collect();
        let ap = average_precision(&scores, &relevant).unwrap();
        assert!((0.35..=0.65).contains(&ap), "seed {seed}: {ap}");
    }
}

#[test]
fn summary_has_container_fields() {
    let v: serde_json::Value = serde_json::from_str(&summary_json("grid", &vec![1, 2])).unwrap();
    assert_eq!(v["format"], "glcc-summary");
    assert_eq!(v["version"], 1);
    assert_eq!(v["kind"], "grid");
    assert_eq!(v["body"], serde_json::json!([1, 2]));
}

// sweeps and grids

fn arcs(seed: u64, n: usize) -> glcc::data::MultiFeatureDataset {
    generate_synthetic(&SyntheticSpec {
        n,
        seed,
        ..Default::default()
    })
    .unwrap()
}

fn fast_config() -> TrainConfig {
    TrainConfig {
        max_iter: 10,
        k_hess: 8,
        ..Default::default()
    }
}

#[test]
fn default_axes() {
    assert_eq!(DEFAULT_FRACTIONS, [0.1, 0.3, 0.5, 0.7, 0.9]);
    assert_eq!(DEFAULT_GRID, [1e-4, 1e-2, 1.0, 1e2, 1e4]);
    let g = GridSpec::default();
    assert_eq!((g.lambdas.len(), g.gammas.len()), (5, 5));
    assert_eq!(SweepSpec::default().fractions, DEFAULT_FRACTIONS.to_vec());
}

#[test]
fn single_fraction_sweep_has_one_row() {
    let spec = SweepSpec {
        fractions: vec![0.3],
        repeats: 1,
        baselines: false,
        ..Default::default()
    };
    let table = sweep_labeled_fraction(&arcs(1, 60), &spec, &fast_config()).unwrap();
    assert_eq!(table.rows.len(), 1);
    assert_eq!(table.runs.len(), 1);
    let row = table.row(0.3, METHOD_GLCC).unwrap();
    assert_eq!((row.runs, row.accuracy_std), (1, 0.0));
    assert_eq!(table.to_delimited().lines().count(), 2);
}

#[test]
fn sweep_is_deterministic_and_reports_both_methods() {
    let spec = SweepSpec {
        fractions: vec![0.2, 0.6],
        repeats: 3,
        seed: 4,
        ..Default::default()
    };
    let data = arcs(2, 80);
    let a = sweep_labeled_fraction(&data, &spec, &fast_config()).unwrap();
    let b = sweep_labeled_fraction(&data, &spec, &fast_config()).unwrap();
    assert_eq!(a.to_delimited(), b.to_delimited());
    assert_eq!(a.rows.len(), 4);
    for f in [0.2, 0.6] {
        for m in [METHOD_GLCC, METHOD_RIDGE] {
            assert_eq!(a.row(f, m).unwrap().runs, 3);
        }
    }
    assert!(a
        .runs
        .iter()
        .filter(|r| r.method == METHOD_GLCC)
        .all(|r| r.trace.is_some()));
}

#[test]
fn sweep_rejects_bad_spec_with_context() {
    let data = arcs(3, 40);
    for fractions in [vec![], vec![1.0], vec![0.0]] {
        let spec = SweepSpec {
            fractions,
            ..Default::default()
        };
        assert!(sweep_labeled_fraction(&data, &spec, &fast_config()).is_err());
    }
    let spec = SweepSpec {
        fractions: vec![0.5],
        repeats: 1,
        ..Default::default()
    };
    let bad = TrainConfig {
        k_hess: 100,
        ..fast_config()
    };
    assert!(sweep_labeled_fraction(&data, &spec, &bad).is_err());
}

#[test]
fn degenerate_grid_equals_direct_run() {
    let data = arcs(5, 60);
    let split_spec = SplitSpec {
        labeled_fraction: 0.3,
        seed: 8,
        ..Default::default()
    };
    let spec = GridSpec {
        lambdas: vec![0.5],
        gammas: vec![2.0],
        split: split_spec,
        metric: GridMetric::Accuracy,
    };
    let cfg = fast_config();
    let grid = grid_search(&data, &spec, &cfg).unwrap();
    let split = apply_split(&data, &split_spec).unwrap();
    let graphs = build_graph_set(data.views(), &cfg.graph_config()).unwrap();
    let direct = TrainConfig {
        lambda: 0.5,
        gamma: 2.0,
        ..cfg
    };
    let (report, _) = train_and_score(&split, &graphs, &direct).unwrap();
    assert_eq!(grid.reports[0][0], report);
    assert_eq!(grid.best, (0, 0));
}

#[test]
fn grid_is_independent_of_evaluation_order() {
    let data = arcs(6, 60);
    let spec = GridSpec {
        lambdas: vec![1e-2, 1.0, 1e2],
        gammas: vec![1e-2, 1.0],
        ..Default::default()
    };
    let cfg = fast_config();
    let base = grid_search(&data, &spec, &cfg).unwrap();
    let mut order: Vec<(usize, usize)> = (0..3).flat_map(|i| (0..2).map(move |j| (i, j))).collect();
    order.shuffle(&mut rng(7));
    assert_eq!(
        grid_search_in_order(&data, &spec, &cfg, &order).unwrap(),
        base
    );
    order.pop();
    assert!(grid_search_in_order(&data, &spec, &cfg, &order).is_err());
    assert_eq!(base.to_delimited().lines().count(), 7);
}

#[test]
fn grid_ties_go_to_smallest_lambda_then_gamma() {
    // Fully separable data: every cell reaches perfect accuracy.
    let data = generate_synthetic(&SyntheticSpec {
        n: 60,
        m: 1,
        c: 2,
        manifold: glcc::data::Manifold::Gaussian,
        latent_noise: 0.1,
        view_noise: 0.0,
        view_dims: vec![4],
        ..Default::default()
    })
    .unwrap();
    let spec = GridSpec {
        lambdas: vec![1.0, 1e-2],
        gammas: vec![1.0, 1e-2],
        ..Default::default()
    };
    let grid = grid_search(&data, &spec, &fast_config()).unwrap();
    assert!((0..2).all(|i| (0..2).all(|j| grid.value(i, j) == 1.0)));
    assert_eq!(grid.best, (1, 1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reports_are_consistent_and_order_free(seed in any::<u64>(), n in 1usize..60, c in 2usize..6) {
        let mut r = rng(seed);
        let preds: Vec<Prediction> = (0..n)
            .map(|_| pred(&(0..c).map(|_| r.random_range(0..4) as f64).collect::<Vec<_>>()))
            .collect();
        let truth: Vec<usize> = (0..n).map(|_| r.random_range(0..c)).collect();
        let report = score(&preds, &truth).unwrap();
        prop_assert!(report.is_consistent());

        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let p2: Vec<Prediction> = perm.iter().map(|&i| preds[i].clone()).collect();
        let t2: Vec<usize> = perm.iter().map(|&i| truth[i]).collect();
        let shuffled = score(&p2, &t2).unwrap();
        prop_assert_eq!(report.accuracy, shuffled.accuracy);
        prop_assert_eq!(&report.confusion, &shuffled.confusion);
    }

    #[test]
    fn ranking_matches_oracle(seed in any::<u64>(), n in 1usize..40) {
        let mut r = rng(seed);
        let scores: Vec<f64> = (0..n).map(|_| r.random_range(0..5) as f64).collect();
        let relevant: Vec<bool> = (0..n).map(|_| r.random()).collect();
        prop_assert_eq!(
            average_precision(&scores, &relevant).map(|v| (v * 1e12).round()),
            ap_oracle(&scores, &relevant).map(|v| (v * 1e12).round())
        );
    }

    #[test]
    fn distinct_scores_make_map_permutation_invariant(seed in any::<u64>(), n in 2usize..60, c in 2usize..5) {
        let mut r = rng(seed);
        let preds: Vec<Prediction> = (0..n)
            .map(|_| pred(&(0..c).map(|_| r.random::<f64>()).collect::<Vec<_>>()))
            .collect();
        let truth: Vec<usize> = (0..n).map(|_| r.random_range(0..c)).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let a = score(&preds, &truth).unwrap();
        let b = score(
            &perm.iter().map(|&i| preds[i].clone()).collect::<Vec<_>>(),
            &perm.iter().map(|&i| truth[i]).collect::<Vec<_>>(),
        )
        .unwrap();
        prop_assert_eq!(a.per_class_ap, b.per_class_ap);
        prop_assert_eq!(a.map, b.map);
    }
}
