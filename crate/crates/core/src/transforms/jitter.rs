//! Brightness / contrast / saturation jitter on RGB images.

use super::config::{AugmentConfig, JitterOrder};
use crate::error::{Error, Result};
use crate::img::{ImageTensor, LUMA_WEIGHTS};
use crate::rng::RandStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JitterStage {
    Brightness,
    Contrast,
    Saturation,
}

/// Factors and stage order for one jitter application.
#[derive(Debug, Clone, PartialEq)]
pub struct JitterParams {
    pub brightness: f64,
    pub contrast: f64,
    pub saturation: f64,
    pub order: [JitterStage; 3],
}

impl JitterParams {
    pub const FIXED_ORDER: [JitterStage; 3] = [
        JitterStage::Brightness,
        JitterStage::Contrast,
        JitterStage::Saturation,
    ];

    /// The factor range for jitter strength `alpha`: `[max(0, 1 - alpha), 1 + alpha]`.
    pub fn factor_range(alpha: f64) -> (f64, f64) {
        ((1.0 - alpha).max(0.0), 1.0 + alpha)
    }

    pub fn sample(cfg: &AugmentConfig, rng: &mut RandStream) -> Self {
        let (lo, hi) = Self::factor_range(cfg.alpha);
        let brightness = rng.uniform(lo, hi);
        let (contrast, saturation) = if cfg.jitter_shared_factor {
            (brightness, brightness)
        } else {
            (rng.uniform(lo, hi), rng.uniform(lo, hi))
        };
        let mut order = Self::FIXED_ORDER;
        if cfg.jitter_order == JitterOrder::Shuffled {
            rng.shuffle(&mut order);
        }
        Self {
            brightness,
            contrast,
            saturation,
            order,
        }
    }
}

fn luma(x: &ImageTensor, i: usize) -> f64 {
    LUMA_WEIGHTS
        .iter()
        .enumerate()
        .map(|(c, w)| w * x.plane(c)[i])
        .sum()
}

/// Applies jitter with explicit factors. Each stage clamps to `[0, 1]`.
pub fn jitter_with(x: &ImageTensor, params: &JitterParams) -> Result<ImageTensor> {
    if x.channels() != 3 {
        return Err(Error::UnsupportedChannels(x.channels()));
    }
    let n = x.height() * x.width();
    let mut out = x.clone();
    for stage in params.order {
        match stage {
            JitterStage::Brightness => {
                let f = params.brightness;
                for v in out.data_mut() {
                    *v = (f * *v).clamp(0.0, 1.0);
                }
            }
            JitterStage::Contrast => {
                let f = params.contrast;
                let mean = (0..n).map(|i| luma(&out, i)).sum::<f64>() / n as f64;
                for v in out.data_mut() {
                    *v = (f * *v + (1.0 - f) * mean).clamp(0.0, 1.0);
                }
            }
            JitterStage::Saturation => {
                let f = params.saturation;
                let gray: Vec<f64> = (0..n).map(|i| luma(&out, i)).collect();
                for c in 0..3 {
                    for (v, g) in out.plane_mut(c).iter_mut().zip(&gray) {
                        *v = (f * *v + (1.0 - f) * g).clamp(0.0, 1.0);
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn color_jitter(x: &ImageTensor, cfg: &AugmentConfig, rng: &mut RandStream) -> Result<ImageTensor> {
    if x.channels() != 3 {
        return Err(Error::UnsupportedChannels(x.channels()));
    }
    jitter_with(x, &JitterParams::sample(cfg, rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noisy(seed: u64) -> ImageTensor {
        let mut rng = RandStream::new(seed);
        ImageTensor::from_fn(3, 8, 8, |_, _, _| rng.next_f64())
    }

    #[test]
    fn zero_alpha_is_bit_identity() {
        let cfg = AugmentConfig {
            alpha: 0.0,
            ..AugmentConfig::default()
        };
        for seed in 0..20 {
            let x = noisy(seed);
            let y = color_jitter(&x, &cfg, &mut RandStream::new(seed + 100)).unwrap();
            assert_eq!(x, y);
        }
    }

    #[test]
    fn factors_stay_in_range() {
        assert_eq!(JitterParams::factor_range(0.5), (0.5, 1.5));
        assert_eq!(JitterParams::factor_range(1.0), (0.0, 2.0));
        let cfg = AugmentConfig::default();
        let mut rng = RandStream::new(5);
        for _ in 0..1000 {
            let p = JitterParams::sample(&cfg, &mut rng);
            for f in [p.brightness, p.contrast, p.saturation] {
                assert!((0.5..=1.5).contains(&f));
            }
        }
    }

    #[test]
    fn saturation_leaves_gray_pixels_alone() {
        let x = ImageTensor::from_fn(3, 4, 4, |_, y, xx| (y * 4 + xx) as f64 / 16.0);
        for f in [0.0, 0.3, 1.7] {
            let p = JitterParams {
                brightness: 1.0,
                contrast: 1.0,
                saturation: f,
                order: JitterParams::FIXED_ORDER,
            };
            let y = jitter_with(&x, &p).unwrap();
            assert!(x.max_abs_diff(&y) < 1e-12);
        }
    }

    #[test]
    fn brightness_scales_then_clamps() {
        let x = ImageTensor::filled(3, 2, 2, 0.8);
        let p = JitterParams {
            brightness: 1.5,
            contrast: 1.0,
            saturation: 1.0,
            order: JitterParams::FIXED_ORDER,
        };
        let y = jitter_with(&x, &p).unwrap();
        assert!(y.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn contrast_blends_toward_mean_luma() {
        let x = ImageTensor::from_fn(3, 1, 2, |_, _, xx| if xx == 0 { 0.2 } else { 0.6 });
        let p = JitterParams {
            brightness: 1.0,
            contrast: 0.0,
            saturation: 1.0,
            order: JitterParams::FIXED_ORDER,
        };
        let y = jitter_with(&x, &p).unwrap();
        assert!(y.data().iter().all(|&v| (v - 0.4).abs() < 1e-12));
    }

    #[test]
    fn non_rgb_rejected() {
        let x = ImageTensor::zeros(1, 2, 2);
        assert!(color_jitter(&x, &AugmentConfig::default(), &mut RandStream::new(0)).is_err());
    }
}
