//! Image → view → artifact map → feature vector.

use super::featurize::{featurize, FeatureVector};
use crate::corr::{local_correlation_map, DEFAULT_WINDOW};
use crate::error::Result;
use crate::features::Extractor;
use crate::harness::{gaussian_blur, jpeg_roundtrip};
use crate::img::{to_gray, ImageTensor};
use crate::rng::RandStream;
use crate::transforms::{
    center_crop, color_jitter, random_crop, random_horizontal_flip, random_mask, random_rotation,
    AugmentConfig,
};

/// Training-time view. Order: optional blur / JPEG on the full image,
/// random crop, flip, jitter, rotation, mask.
pub fn train_view(x: &ImageTensor, aug: &AugmentConfig, rng: &mut RandStream) -> Result<ImageTensor> {
    let mut v = x.clone();
    if aug.blur_prob > 0.0 && rng.bernoulli(aug.blur_prob) {
        let sigma = rng.uniform(aug.blur_sigma_min, aug.blur_sigma_max);
        v = gaussian_blur(&v, sigma)?;
    }
    if aug.jpeg_prob > 0.0 && rng.bernoulli(aug.jpeg_prob) {
        let span = aug.jpeg_quality_max.saturating_sub(aug.jpeg_quality_min).max(1);
        let q = aug.jpeg_quality_min + rng.up_to(span as usize - 1) as u8;
        v = jpeg_roundtrip(&v, q)?;
    }
    v = random_crop(&v, aug.crop_size, rng);
    if aug.flip_prob > 0.0 {
        v = random_horizontal_flip(&v, aug.flip_prob, rng);
    }
    if aug.alpha > 0.0 && v.channels() == 3 {
        v = color_jitter(&v, aug, rng)?;
    }
    if aug.beta > 0.0 {
        v = random_rotation(&v, aug.beta, rng);
    }
    if aug.mask_prob > 0.0 {
        v = random_mask(&v, aug, rng)?.0;
    }
    Ok(v)
}

/// Inference view: a deterministic center crop.
pub fn eval_view(x: &ImageTensor, crop: usize) -> ImageTensor {
    center_crop(x, crop)
}

/// Artifact map of `view` plus the correlation histogram of its luma.
pub fn view_features(view: &ImageTensor, extractor: &Extractor) -> Result<FeatureVector> {
    let map = extractor.apply(view)?;
    let corr = local_correlation_map(&to_gray(view)?, DEFAULT_WINDOW)?;
    featurize(&map, &corr)
}
