mod common;

use std::path::{Path, PathBuf};

use common::*;
use glcc::data::{
    apply_split, generate_synthetic, load_dataset, save_dataset, Manifold, SplitSpec,
    SyntheticSpec, TextFormat,
};
use glcc::eval::predict_rows;
use glcc::graphs::build_graph_set;
use glcc::model::train;
use glcc::GlccError;
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn loads_aligned_views_and_partial_labels() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "color.csv", "1,2\n3,4\n5,6\n7,8\n");
    let b = write(dir.path(), "shape.csv", "0.5\n1.5\n2.5\n3.5\n");
    let labels = write(dir.path(), "labels.csv", "0,a\n1,a\n2,?\n3,b\n");
    let data = load_dataset(&[a, b], &labels, &TextFormat::default(), None).unwrap();
    assert_eq!((data.n(), data.m(), data.c()), (4, 2, 2));
    assert_eq!(data.labeled_mask(), &[true, true, false, true]);
    assert_eq!(data.class_names(), &["a", "b"]);
    assert_eq!(data.y().row(2).iter().sum::<f64>(), 0.0);
    assert_eq!(data.y()[(3, 1)], 1.0);
    assert_eq!(data.views()[0].name, "color");
    assert_eq!(data.views()[1].data[(2, 0)], 2.5);
}

#[test]
fn header_and_delimiter_are_configurable() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "v.tsv", "f1\tf2\n1\t2\n3\t4\n");
    let labels = write(dir.path(), "l.tsv", "idx\tclass\n1\ty\n0\tx\n");
    let fmt = TextFormat {
        delimiter: '\t',
        has_header: true,
    };
    let data = load_dataset(&[a], &labels, &fmt, None).unwrap();
    assert_eq!(data.n(), 2);
    assert_eq!(data.class_names(), &["y", "x"]);
    assert_eq!(data.labels(), vec![Some(1), Some(0)]);
}

#[test]
fn row_count_mismatch_names_files_and_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "five.csv", "1\n2\n3\n4\n5\n");
    let b = write(dir.path(), "six.csv", "1\n2\n3\n4\n5\n6\n");
    let labels = write(dir.path(), "labels.csv", "0,a\n");
    let err = load_dataset(&[a, b], &labels, &TextFormat::default(), None).unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, GlccError::Data(_)));
    for part in ["five.csv", "six.csv", "5", "6"] {
        assert!(msg.contains(part), "{msg}");
    }
}

#[test]
fn non_numeric_cell_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "v.csv", "1,2\n3,x\n");
    let labels = write(dir.path(), "labels.csv", "0,a\n1,a\n");
    let err = load_dataset(&[a], &labels, &TextFormat::default(), None).unwrap_err();
    let msg = err.to_string();
    assert!(
        msg.contains("row 1") && msg.contains("column 1") && msg.contains("'x'"),
        "{msg}"
    );
}

#[test]
fn unknown_classes_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "v.csv", "1\n2\n3\n");
    let labels = write(dir.path(), "labels.csv", "0,a\n1,zebra\n2,yak\n");
    let known = vec!["a".to_string(), "b".to_string()];
    let err = load_dataset(&[a], &labels, &TextFormat::default(), Some(&known)).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("zebra") && msg.contains("yak"), "{msg}");
}

#[test]
fn save_then_load_is_bit_identical() {
    let data = generate_synthetic(&SyntheticSpec {
        n: 40,
        m: 3,
        c: 3,
        seed: 5,
        ..Default::default()
    })
    .unwrap();
    let split = apply_split(
        &data,
        &SplitSpec {
            labeled_fraction: 0.3,
            ..Default::default()
        },
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let saved = save_dataset(&split.dataset, dir.path(), &TextFormat::default()).unwrap();
    let back = load_dataset(
        &saved.views,
        &saved.labels,
        &TextFormat::default(),
        Some(data.class_names()),
    )
    .unwrap();
    assert_eq!(back.labels(), split.dataset.labels());
    for (a, b) in back.views().iter().zip(split.dataset.views()) {
        assert_eq!(a.name, b.name);
        assert!(a
            .data
            .iter()
            .zip(b.data.iter())
            .all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}

// splits

fn balanced(n: usize, c: usize) -> glcc::data::MultiFeatureDataset {
    generate_synthetic(&SyntheticSpec {
        n,
        m: 1,
        c,
        manifold: Manifold::Gaussian,
        ..Default::default()
    })
    .unwrap()
}

#[test]
fn full_fraction_is_identity() {
    let data = balanced(20, 2);
    let split = apply_split(
        &data,
        &SplitSpec {
            labeled_fraction: 1.0,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(split.dataset, data);
    assert_eq!(split.truth, data.full_labels().unwrap());
}

#[test]
fn stratified_split_takes_per_class_ceiling() {
    let data = balanced(10, 2);
    let split = apply_split(
        &data,
        &SplitSpec {
            labeled_fraction: 0.5,
            stratified: true,
            seed: 3,
        },
    )
    .unwrap();
    let per_class = |k| {
        split
            .dataset
            .labels()
            .iter()
            .filter(|l| **l == Some(k))
            .count()
    };
    assert_eq!((per_class(0), per_class(1)), (3, 3));
    let plain = apply_split(
        &data,
        &SplitSpec {
            labeled_fraction: 0.5,
            stratified: false,
            seed: 3,
        },
    )
    .unwrap();
    assert_eq!(plain.dataset.num_labeled(), 5);
}

#[test]
fn split_rejects_bad_fractions() {
    let data = balanced(10, 2);
    for f in [0.0, -0.1, 1.5, f64::NAN] {
        assert!(apply_split(
            &data,
            &SplitSpec {
                labeled_fraction: f,
                ..Default::default()
            }
        )
        .is_err());
    }
    let partial = data.with_labels(&[None; 10]).unwrap();
    assert!(apply_split(&partial, &SplitSpec::default()).is_err());
}

#[test]
fn split_masks_follow_the_seed() {
    let data = balanced(60, 3);
    let mask = |seed| {
        apply_split(
            &data,
            &SplitSpec {
                labeled_fraction: 0.3,
                stratified: true,
                seed,
            },
        )
        .unwrap()
        .dataset
    };
    assert_eq!(mask(1), mask(1));
    let (a, b) = (mask(1), mask(2));
    assert_ne!(a.labeled_mask(), b.labeled_mask());
    for k in 0..3 {
        let count = |d: &glcc::data::MultiFeatureDataset| {
            d.labels().iter().filter(|l| **l == Some(k)).count()
        };
        assert_eq!(count(&a), count(&b));
        assert_eq!(count(&a), 6);
    }
}

// synthetic

fn one_nn_accuracy(
    x: &nalgebra::DMatrix<f64>,
    truth: &[usize],
    train: &[usize],
    test: &[usize],
) -> f64 {
    let hits = test
        .iter()
        .filter(|&&i| {
            let nearest = train
                .iter()
                .min_by(|&&a, &&b| {
                    (x.row(i) - x.row(a))
                        .norm()
                        .total_cmp(&(x.row(i) - x.row(b)).norm())
                })
                .unwrap();
            truth[*nearest] == truth[i]
        })
        .count();
    hits as f64 / test.len() as f64
}

#[test]
fn noiseless_clusters_are_separable_in_every_view() {
    for m in 1..4 {
        let spec = SyntheticSpec {
            n: 60,
            m,
            c: 2,
            manifold: Manifold::Gaussian,
            latent_noise: 0.0,
            view_noise: 0.0,
            seed: m as u64,
            ..Default::default()
        };
        let data = generate_synthetic(&spec).unwrap();
        let truth = data.full_labels().unwrap();
        let (train, test): (Vec<usize>, Vec<usize>) = (0..60).partition(|i| i % 3 == 0);
        for v in data.views() {
            assert_eq!(one_nn_accuracy(&v.data, &truth, &train, &test), 1.0);
        }
    }
}

#[test]
fn synthetic_is_deterministic_and_seed_sensitive() {
    let spec = SyntheticSpec {
        n: 50,
        m: 2,
        c: 3,
        seed: 9,
        ..Default::default()
    };
    assert_eq!(
        generate_synthetic(&spec).unwrap(),
        generate_synthetic(&spec).unwrap()
    );
    assert_ne!(
        generate_synthetic(&spec).unwrap(),
        generate_synthetic(&SyntheticSpec { seed: 10, ..spec }).unwrap()
    );
}

#[test]
fn predictions_are_invariant_to_sample_order() {
    let data = generate_synthetic(&SyntheticSpec {
        n: 80,
        m: 2,
        c: 2,
        seed: 4,
        view_dims: vec![5, 8],
        ..Default::default()
    })
    .unwrap();
    let split = apply_split(
        &data,
        &SplitSpec {
            labeled_fraction: 0.3,
            ..Default::default()
        },
    )
    .unwrap();
    let graph = small_graph_config(2);
    let cfg = config_with(&graph, 1.0, 1.0);

    let mut perm: Vec<usize> = (0..80).collect();
    perm.shuffle(&mut rng(5));
    let shuffled = split.dataset.permuted(&perm).unwrap();

    let (p1, _) = train(
        &split.dataset,
        &build_graph_set(split.dataset.views(), &graph).unwrap(),
        &cfg,
    )
    .unwrap();
    let (p2, _) = train(
        &shuffled,
        &build_graph_set(shuffled.views(), &graph).unwrap(),
        &cfg,
    )
    .unwrap();

    let probe = generate_synthetic(&SyntheticSpec {
        n: 20,
        m: 2,
        c: 2,
        seed: 99,
        view_dims: vec![5, 8],
        ..Default::default()
    })
    .unwrap();
    let rows: Vec<usize> = (0..20).collect();
    let a = predict_rows(&p1, &probe, &rows).unwrap();
    let b = predict_rows(&p2, &probe, &rows).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.label, y.label);
        for (s, t) in x.scores.iter().zip(&y.scores) {
            assert!((s - t).abs() <= 1e-6 * (1.0 + s.abs()), "{s} vs {t}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn label_matrix_is_one_hot_or_empty(
        seed in any::<u64>(),
        n in 8usize..60,
        c in 2usize..6,
        fraction in 0.05f64..1.0,
    ) {
        let data = random_instance(seed, n, 2, c, fraction);
        for i in 0..n {
            let row_sum: f64 = data.y().row(i).iter().sum();
            prop_assert!(data.y().row(i).iter().all(|&v| v == 0.0 || v == 1.0));
            prop_assert_eq!(row_sum, if data.labeled_mask()[i] { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn permutation_moves_every_view_and_label_together(seed in any::<u64>(), n in 5usize..40) {
        let data = random_instance(seed, n, 3, 3, 0.5);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng(seed ^ 1));
        let moved = data.permuted(&perm).unwrap();
        for (j, &p) in perm.iter().enumerate() {
            prop_assert_eq!(moved.label(j), data.label(p));
            prop_assert_eq!(moved.y().row(j), data.y().row(p));
            for (a, b) in moved.views().iter().zip(data.views()) {
                prop_assert_eq!(a.data.row(j), b.data.row(p));
            }
        }
    }

    #[test]
    fn stratified_counts_are_per_class_ceilings(seed in any::<u64>(), fraction in 0.05f64..=1.0) {
        let data = balanced(60, 3);
        let split = apply_split(&data, &SplitSpec { labeled_fraction: fraction, stratified: true, seed }).unwrap();
        let expected = glcc::data::labeled_count(fraction, 20);
        for k in 0..3 {
            let got = split.dataset.labels().iter().filter(|l| **l == Some(k)).count();
            prop_assert_eq!(got, expected);
        }
        for i in 0..60 {
            if let Some(k) = split.dataset.label(i) {
                prop_assert_eq!(k, split.truth[i]);
            }
        }
    }
}
