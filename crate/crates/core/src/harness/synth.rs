//! Toy fake synthesizer and a procedural stand-in for natural photographs.

use rustfft::num_complex::Complex;

use crate::error::{Error, Result};
use crate::features::{fft2_inplace, signed_freq};
use crate::img::{bilinear_resize, correlate3x3, quantize_u8, ImageTensor};
use crate::rng::RandStream;

/// Center 0.5, the other half spread evenly over the eight neighbors.
pub const SMOOTHING_KERNEL: [[f64; 3]; 3] = [
    [0.0625, 0.0625, 0.0625],
    [0.0625, 0.5, 0.0625],
    [0.0625, 0.0625, 0.0625],
];

/// Bilinear down to half size, back up, then 3×3 smoothing; clamped to [0, 1].
pub fn synthesize_fake(x: &ImageTensor) -> Result<ImageTensor> {
    let (_, h, w) = x.shape();
    if h % 2 != 0 || w % 2 != 0 || h < 2 || w < 2 {
        return Err(Error::Shape(format!("synthesize_fake needs even dimensions, got {h}x{w}")));
    }
    let down = bilinear_resize(x, h / 2, w / 2)?;
    let up = bilinear_resize(&down, h, w)?;
    let mut out = up.map_planes(h, w, |p| correlate3x3(p, h, w, &SMOOTHING_KERNEL));
    out.clamp01();
    Ok(out)
}

/// Parameters of the procedural natural-image generator.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalConfig {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    /// Spectral slope: amplitude falls as `1 / f^slope`.
    pub slope: f64,
    pub max_shapes: usize,
    /// Standard deviation of additive per-pixel sensor noise.
    pub noise_sigma: f64,
}

impl Default for NaturalConfig {
    fn default() -> Self {
        Self {
            height: 64,
            width: 64,
            channels: 3,
            slope: 1.0,
            max_shapes: 6,
            noise_sigma: 0.02,
        }
    }
}

/// Zero-mean, unit-variance field with a `1/f^slope` amplitude spectrum.
fn pink_field(h: usize, w: usize, slope: f64, rng: &mut RandStream) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = (0..h * w)
        .map(|_| Complex::new(rng.gaussian(1.0), 0.0))
        .collect();
    fft2_inplace(&mut buf, h, w, false);
    for y in 0..h {
        let fy = signed_freq(y, h) as f64 / h as f64;
        for x in 0..w {
            let fx = signed_freq(x, w) as f64 / w as f64;
            let f = (fy * fy + fx * fx).sqrt();
            buf[y * w + x] *= if f == 0.0 { 0.0 } else { f.powf(-slope) };
        }
    }
    fft2_inplace(&mut buf, h, w, true);
    let vals: Vec<f64> = buf.iter().map(|c| c.re).collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let std = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64)
        .sqrt()
        .max(1e-12);
    vals.into_iter().map(|v| (v - mean) / std).collect()
}

/// One 8-bit "photograph": a `1/f` texture with a color cast, a few flat
/// shapes with soft edges, and sensor noise.
pub fn natural_image(cfg: &NaturalConfig, rng: &mut RandStream) -> Result<ImageTensor> {
    let (c, h, w) = (cfg.channels, cfg.height, cfg.width);
    if !(c == 1 || c == 3) || h == 0 || w == 0 {
        return Err(Error::Shape(format!("cannot generate a {c}x{h}x{w} image")));
    }
    let base = pink_field(h, w, cfg.slope, rng);
    let tint = pink_field(h, w, cfg.slope + 0.5, rng);
    let contrast = rng.uniform(0.08, 0.18);
    let level = rng.uniform(0.35, 0.65);
    let cast: Vec<f64> = (0..c).map(|_| rng.uniform(-0.06, 0.06)).collect();
    let tint_gain: Vec<f64> = (0..c).map(|_| rng.uniform(-0.04, 0.04)).collect();
    let mut img = ImageTensor::from_fn(c, h, w, |ch, y, x| {
        let i = y * w + x;
        level + cast[ch] + contrast * base[i] + tint_gain[ch] * tint[i]
    });

    let shapes = rng.up_to(cfg.max_shapes);
    for _ in 0..shapes {
        let cy = rng.uniform(0.0, h as f64);
        let cx = rng.uniform(0.0, w as f64);
        let ry = rng.uniform(0.05, 0.3) * h as f64;
        let rx = rng.uniform(0.05, 0.3) * w as f64;
        let ellipse = rng.bernoulli(0.5);
        let color: Vec<f64> = (0..c).map(|_| rng.uniform(0.1, 0.9)).collect();
        let opacity = rng.uniform(0.4, 0.9);
        for y in 0..h {
            for x in 0..w {
                let dy = (y as f64 + 0.5 - cy) / ry;
                let dx = (x as f64 + 0.5 - cx) / rx;
                let d = if ellipse {
                    (dy * dy + dx * dx).sqrt()
                } else {
                    dy.abs().max(dx.abs())
                };
                // One-pixel soft edge.
                let edge = 1.0 / ry.min(rx);
                let cover = ((1.0 - d) / edge + 0.5).clamp(0.0, 1.0) * opacity;
                if cover > 0.0 {
                    for (ch, &col) in color.iter().enumerate() {
                        let v = img.get(ch, y, x);
                        img.set(ch, y, x, v + cover * (col - v));
                    }
                }
            }
        }
    }

    let sigma = cfg.noise_sigma.max(0.0);
    for v in img.data_mut() {
        *v += rng.gaussian(sigma);
    }
    img.clamp01();
    Ok(quantize_u8(&img))
}

/// `count` natural images; image `i` depends only on `(seed, i)`.
pub fn natural_corpus(cfg: &NaturalConfig, count: usize, seed: u64) -> Result<Vec<ImageTensor>> {
    (0..count)
        .map(|i| natural_image(cfg, &mut RandStream::split(seed, u64::MAX, i as u64)))
        .collect()
}
