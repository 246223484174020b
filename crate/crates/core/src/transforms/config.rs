use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Order in which the three jitter stages run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum JitterOrder {
    /// brightness → contrast → saturation
    #[default]
    Fixed,
    /// A fresh permutation per call, drawn from the sample's stream.
    Shuffled,
}

/// Augmentation and preprocessing parameters.
///
/// Setting `flip_prob`, `alpha`, `beta` or `mask_prob` to zero disables the
/// corresponding augmentation. `blur_prob` / `jpeg_prob` enable the
/// robustness-training variants and are off by default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    pub alpha: f64,
    /// Degrees.
    pub beta: f64,
    pub mask_prob: f64,
    pub patch_size: usize,
    pub max_mask_ratio: f64,
    pub flip_prob: f64,
    pub crop_size: usize,
    pub jitter_order: JitterOrder,
    /// Draw one factor for all three jitter stages instead of three.
    pub jitter_shared_factor: bool,
    pub blur_prob: f64,
    pub blur_sigma_min: f64,
    pub blur_sigma_max: f64,
    pub jpeg_prob: f64,
    pub jpeg_quality_min: u8,
    /// Exclusive.
    pub jpeg_quality_max: u8,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            beta: 180.0,
            mask_prob: 0.5,
            patch_size: 16,
            max_mask_ratio: 0.75,
            flip_prob: 0.5,
            crop_size: 256,
            jitter_order: JitterOrder::Fixed,
            jitter_shared_factor: false,
            blur_prob: 0.0,
            blur_sigma_min: 0.1,
            blur_sigma_max: 2.0,
            jpeg_prob: 0.0,
            jpeg_quality_min: 70,
            jpeg_quality_max: 100,
        }
    }
}

fn unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidConfig(format!("{name} = {v} must lie in [0, 1]")));
    }
    Ok(())
}

impl AugmentConfig {
    /// Crop-only preprocessing, every augmentation off.
    pub fn no_augment() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
            mask_prob: 0.0,
            flip_prob: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        unit("alpha", self.alpha)?;
        unit("mask_prob", self.mask_prob)?;
        unit("flip_prob", self.flip_prob)?;
        unit("blur_prob", self.blur_prob)?;
        unit("jpeg_prob", self.jpeg_prob)?;
        if !(0.0..=180.0).contains(&self.beta) {
            return Err(Error::InvalidConfig(format!(
                "beta = {} must lie in [0, 180] degrees",
                self.beta
            )));
        }
        if !(self.max_mask_ratio > 0.0 && self.max_mask_ratio < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "max_mask_ratio = {} must lie in (0, 1)",
                self.max_mask_ratio
            )));
        }
        if self.patch_size == 0 {
            return Err(Error::InvalidConfig("patch_size must be at least 1".into()));
        }
        if self.crop_size == 0 {
            return Err(Error::InvalidConfig("crop_size must be at least 1".into()));
        }
        if self.patch_size > self.crop_size {
            return Err(Error::InvalidConfig(format!(
                "patch_size {} exceeds crop_size {}",
                self.patch_size, self.crop_size
            )));
        }
        if !(self.blur_sigma_min > 0.0 && self.blur_sigma_min <= self.blur_sigma_max) {
            return Err(Error::InvalidConfig(
                "blur sigma range must satisfy 0 < min <= max".into(),
            ));
        }
        if !(1..100).contains(&self.jpeg_quality_min)
            || !(self.jpeg_quality_min < self.jpeg_quality_max && self.jpeg_quality_max <= 100)
        {
            return Err(Error::InvalidConfig(
                "jpeg quality range must satisfy 1 <= min < max <= 100".into(),
            ));
        }
        Ok(())
    }

    /// Parses a `key = value` config file; unknown keys are rejected and
    /// missing keys keep their defaults.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path).map_err(|e| Error::from(e).at_path(path))?;
        Self::from_toml_str(&s).map_err(|e| e.at_path(path))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
