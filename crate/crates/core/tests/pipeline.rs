mod common;

use std::path::Path;

use sidforge::classifier::{eval_view, train, view_features, LogisticModel, TrainConfig};
use sidforge::features::{Extractor, ExtractorKind};
use sidforge::harness::{
    accuracy, evaluate, load_dataset, Dataset, EvalOptions, PerturbSpec, REAL_DIR,
};
use sidforge::rng::RandStream;
use sidforge::transforms::AugmentConfig;

fn small_aug() -> AugmentConfig {
    AugmentConfig {
        crop_size: 64,
        patch_size: 8,
        ..AugmentConfig::default()
    }
}

fn opts() -> EvalOptions {
    EvalOptions {
        crop: 64,
        ..EvalOptions::default()
    }
}

fn toy(root: &Path, sources: &[(&str, u64)], pairs: usize) -> Dataset {
    for &(name, seed) in sources {
        common::write_pairs(root, name, &common::corpus(72, pairs, seed));
    }
    load_dataset(root).unwrap()
}

fn quick_cfg(epochs: usize) -> TrainConfig {
    TrainConfig {
        epochs,
        batch_size: 8,
        ..TrainConfig::default()
    }
}

#[test]
fn zero_epochs_returns_initial_model() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = toy(tmp.path(), &[("a", 1)], 2);
    let cfg = TrainConfig {
        epochs: 0,
        warmup_epochs: 0,
        ..TrainConfig::default()
    };
    let out = train(&ds, &cfg, &small_aug(), &Extractor::default()).unwrap();
    assert!(out.history.is_empty());
    assert_eq!(out.model, LogisticModel::default());
}

#[test]
fn single_class_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let mut ds = toy(tmp.path(), &[("a", 1)], 2);
    ds.samples.retain(|s| s.label == 0);
    assert!(train(&ds, &quick_cfg(1), &small_aug(), &Extractor::default()).is_err());
}

#[test]
fn training_is_reproducible_and_loss_falls() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = toy(tmp.path(), &[("a", 2)], 12);
    let ex = Extractor::new(ExtractorKind::DwtHh);
    let aug = AugmentConfig {
        crop_size: 64,
        ..AugmentConfig::no_augment()
    };
    let a = train(&ds, &quick_cfg(20), &aug, &ex).unwrap();
    let b = train(&ds, &quick_cfg(20), &aug, &ex).unwrap();
    assert_eq!(a.model.to_bytes(), b.model.to_bytes());
    assert_eq!(a.history, b.history);
    assert_eq!(a.history.len(), 20);
    assert!(a.history[19] < a.history[0], "{:?}", a.history);

    // Scoring the training images through the evaluation path gives the
    // same accuracy as scoring them by hand.
    let report = evaluate(&a.model, &ds, &ex, None, &opts()).unwrap();
    let scores: Vec<f64> = ds
        .samples
        .iter()
        .map(|s| {
            let view = eval_view(&s.load().unwrap(), 64);
            a.model.score(&view_features(&view, &ex).unwrap())
        })
        .collect();
    assert_eq!(report.acc_m, accuracy(&scores, &ds.labels(), 0.5).unwrap());
}

#[test]
fn evaluation_contracts() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = toy(tmp.path(), &[("gan_a", 3), ("gan_b", 4)], 6);
    let ex = Extractor::default();
    let model = train(&ds, &quick_cfg(4), &small_aug(), &ex).unwrap().model;

    let base = evaluate(&model, &ds, &ex, None, &opts()).unwrap();
    assert_eq!(base.sources.len(), 2);
    assert_eq!(base.total, 24);
    let mean_acc = (base.sources[0].acc + base.sources[1].acc) / 2.0;
    assert_eq!(base.acc_m, mean_acc);

    let mut shuffled = ds.clone();
    RandStream::new(9).shuffle(&mut shuffled.samples);
    assert_eq!(evaluate(&model, &shuffled, &ex, None, &opts()).unwrap(), base);

    let zero_mask = PerturbSpec::RandomMaskEval { ratio: 0.0, patch: 8 };
    assert_eq!(evaluate(&model, &ds, &ex, Some(&zero_mask), &opts()).unwrap(), base);

    for q in [70, 80, 90, 99] {
        let r = evaluate(&model, &ds, &ex, Some(&PerturbSpec::Jpeg { quality: q }), &opts()).unwrap();
        assert_eq!(r.total, 24);
    }

    let a = evaluate(&model, &ds, &ex, None, &opts()).unwrap().to_csv();
    assert_eq!(a, base.to_csv());
}

#[test]
fn bad_samples_fail_or_are_skipped() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = toy(tmp.path(), &[("a", 5)], 3);
    std::fs::write(tmp.path().join("a").join(REAL_DIR).join("zz_broken.png"), b"not a png").unwrap();
    let ds_bad = load_dataset(tmp.path()).unwrap();
    assert_eq!(ds_bad.len(), ds.len() + 1);
    let model = LogisticModel::default();
    let ex = Extractor::default();
    let err = evaluate(&model, &ds_bad, &ex, None, &opts()).unwrap_err();
    assert!(err.to_string().contains("zz_broken.png"), "{err}");
    let skip = EvalOptions {
        skip_bad: true,
        ..opts()
    };
    let r = evaluate(&model, &ds_bad, &ex, None, &skip).unwrap();
    assert_eq!((r.failed, r.total), (1, ds.len()));
}

#[test]
fn blur_accuracy_does_not_rise_with_sigma() {
    let tmp = tempfile::tempdir().unwrap();
    let train_ds = toy(&tmp.path().join("train"), &[("toy", 6)], 16);
    let test_ds = toy(&tmp.path().join("test"), &[("toy", 7)], 16);
    let ex = Extractor::new(ExtractorKind::DwtHh);
    let model = train(&train_ds, &quick_cfg(10), &small_aug(), &ex).unwrap().model;
    let accs: Vec<f64> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&sigma| {
            let p = PerturbSpec::GaussianBlur { sigma };
            evaluate(&model, &test_ds, &ex, Some(&p), &opts()).unwrap().acc_m
        })
        .collect();
    for pair in accs.windows(2) {
        assert!(pair[1] <= pair[0] + 0.02, "{accs:?}");
    }
}
