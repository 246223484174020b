//! Crop preprocessing and the training augmentations, all driven by an
//! explicit [`RandStream`](crate::rng::RandStream).

mod config;
mod geometry;
mod jitter;
mod mask;

pub use config::{AugmentConfig, JitterOrder};
pub use geometry::{
    center_crop, crop_at, horizontal_flip, pad_to_min, random_crop, random_horizontal_flip,
    random_rotation, rotate, vertical_flip,
};
pub use jitter::{color_jitter, jitter_with, JitterParams, JitterStage};
pub use mask::{apply_cells, mask_with_ratio, patch_count, random_mask};
