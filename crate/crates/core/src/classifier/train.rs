use rayon::prelude::*;

use super::featurize::{FeatureVector, FEATURE_DIM};
use super::model::{bce_loss_and_grad, LogisticModel};
use super::optim::{adamw_step, lr_schedule, AdamState, TrainConfig};
use super::pipeline::{train_view, view_features};
use crate::error::{Error, Result};
use crate::features::Extractor;
use crate::harness::Dataset;
use crate::rng::RandStream;
use crate::transforms::AugmentConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: LogisticModel,
    /// Mean per-sample training loss of each epoch.
    pub history: Vec<f64>,
}

/// Augmented features of every sample for one epoch, in dataset order.
pub fn epoch_features(
    dataset: &Dataset,
    aug: &AugmentConfig,
    extractor: &Extractor,
    seed: u64,
    epoch: u64,
) -> Result<Vec<FeatureVector>> {
    dataset
        .samples
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let x = s.load()?;
            let mut rng = RandStream::split(seed, epoch, i as u64);
            let view = train_view(&x, aug, &mut rng)?;
            view_features(&view, extractor).map_err(|e| e.at_path(&s.path))
        })
        .collect()
}

/// Fits the logistic head. Features are recomputed every epoch with fresh
/// augmentation draws; standardization is fitted on the first epoch and then
/// frozen.
pub fn train(
    dataset: &Dataset,
    cfg: &TrainConfig,
    aug: &AugmentConfig,
    extractor: &Extractor,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    aug.validate()?;
    if !dataset.has_both_classes() {
        return Err(Error::Dataset(
            "training needs both natural and synthetic samples".into(),
        ));
    }
    let mut model = LogisticModel::default();
    let mut history = Vec::with_capacity(cfg.epochs);
    if cfg.epochs == 0 {
        return Ok(TrainOutcome { model, history });
    }
    let n = dataset.len();
    let labels = dataset.labels();
    let steps_per_epoch = n.div_ceil(cfg.batch_size);
    let total_steps = steps_per_epoch * cfg.epochs;
    let warmup_steps = steps_per_epoch * cfg.warmup_epochs;
    let mut state = AdamState::new(FEATURE_DIM);
    let mut step = 0;
    for epoch in 0..cfg.epochs {
        let feats = epoch_features(dataset, aug, extractor, cfg.seed, epoch as u64)?;
        if epoch == 0 {
            model.fit_standardization(&feats);
        }
        let mut order: Vec<usize> = (0..n).collect();
        RandStream::split(cfg.seed, epoch as u64, u64::MAX).shuffle(&mut order);
        let mut loss_sum = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let bf: Vec<FeatureVector> = batch.iter().map(|&i| feats[i]).collect();
            let bl: Vec<u8> = batch.iter().map(|&i| labels[i]).collect();
            let grads = bce_loss_and_grad(&model, &bf, &bl);
            loss_sum += grads.loss * batch.len() as f64;
            let lr = lr_schedule(step, total_steps, warmup_steps, cfg.lr);
            adamw_step(&mut model, &grads, &mut state, lr, cfg);
            step += 1;
        }
        let mean_loss = loss_sum / n as f64;
        log::info!("epoch {}/{}: loss {mean_loss:.6}", epoch + 1, cfg.epochs);
        history.push(mean_loss);
    }
    if !model.is_finite() {
        return Err(Error::InvalidConfig(
            "training diverged to non-finite parameters".into(),
        ));
    }
    Ok(TrainOutcome { model, history })
}
