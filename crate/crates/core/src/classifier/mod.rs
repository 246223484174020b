//! Desk-scale detector head: fixed statistics of the artifact map plus a
//! logistic model trained with AdamW under a warmup + cosine schedule.

mod featurize;
mod model;
mod optim;
mod pipeline;
mod train;

pub use featurize::{featurize, FeatureVector, CHANNEL_SLOTS, FEATURE_DIM, GRID_SLOTS, HIST_SLOTS};
pub use model::{bce_loss_and_grad, sigmoid, LogisticModel, LossGrad, SIDM_MAGIC, SIDM_VERSION};
pub use optim::{adamw_step, lr_schedule, AdamState, TrainConfig};
pub use pipeline::{eval_view, train_view, view_features};
pub use train::{epoch_features, train, TrainOutcome};
