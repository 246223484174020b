//! Post-hoc image degradations for robustness evaluation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::img::{decode_image, encode_jpeg, reflect101, ImageTensor};
use crate::rng::{mix64, RandStream};
use crate::transforms::mask_with_ratio;

/// Normalized taps of a Gaussian truncated at radius `ceil(3σ)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

fn convolve_axis(src: &[f64], dst: &mut [f64], h: usize, w: usize, k: &[f64], along_rows: bool) {
    let r = (k.len() / 2) as isize;
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (t, &kv) in k.iter().enumerate() {
                let off = t as isize - r;
                let (sy, sx) = if along_rows {
                    (y, reflect101(x as isize + off, w))
                } else {
                    (reflect101(y as isize + off, h), x)
                };
                acc += kv * src[sy * w + sx];
            }
            dst[y * w + x] = acc;
        }
    }
}

/// Separable Gaussian blur with reflect-101 borders.
pub fn gaussian_blur(x: &ImageTensor, sigma: f64) -> Result<ImageTensor> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidConfig(format!("blur sigma = {sigma} must be > 0")));
    }
    let k = gaussian_kernel(sigma);
    let (_, h, w) = x.shape();
    Ok(x.map_planes(h, w, |p| {
        let mut tmp = vec![0.0; h * w];
        let mut out = vec![0.0; h * w];
        convolve_axis(p, &mut tmp, h, w, &k, true);
        convolve_axis(&tmp, &mut out, h, w, &k, false);
        out
    }))
}

/// Encodes as baseline JPEG at quality `q` and decodes back.
pub fn jpeg_roundtrip(x: &ImageTensor, quality: u8) -> Result<ImageTensor> {
    if !(1..100).contains(&quality) {
        return Err(Error::InvalidConfig(format!(
            "JPEG quality {quality} must lie in [1, 100)"
        )));
    }
    decode_image(&encode_jpeg(x, quality)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbSpec {
    GaussianBlur { sigma: f64 },
    Jpeg { quality: u8 },
    /// Masks a fixed fraction of `patch × patch` cells of the full image.
    RandomMaskEval { ratio: f64, patch: usize },
}

impl PerturbSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        match *self {
            Self::GaussianBlur { sigma } if !(sigma > 0.0 && sigma.is_finite()) => {
                bad(format!("sigma = {sigma} must be > 0"))
            }
            Self::Jpeg { quality } if !(1..100).contains(&quality) => {
                bad(format!("quality = {quality} must lie in [1, 100)"))
            }
            Self::RandomMaskEval { ratio, .. } if !(0.0..=1.0).contains(&ratio) => {
                bad(format!("mask ratio = {ratio} must lie in [0, 1]"))
            }
            Self::RandomMaskEval { patch: 0, .. } => bad("mask patch must be >= 1".into()),
            _ => Ok(()),
        }
    }

    /// Applies the perturbation. `key` selects the mask placement so each
    /// sample gets its own fixed layout.
    pub fn apply(&self, x: &ImageTensor, seed: u64, key: u64) -> Result<ImageTensor> {
        self.validate()?;
        match *self {
            Self::GaussianBlur { sigma } => gaussian_blur(x, sigma),
            Self::Jpeg { quality } => jpeg_roundtrip(x, quality),
            Self::RandomMaskEval { ratio, patch } => {
                let mut rng = RandStream::new(mix64(seed) ^ key);
                Ok(mask_with_ratio(x, patch, ratio, &mut rng)?.0)
            }
        }
    }
}

impl fmt::Display for PerturbSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GaussianBlur { sigma } => write!(f, "blur:{sigma}"),
            Self::Jpeg { quality } => write!(f, "jpeg:{quality}"),
            Self::RandomMaskEval { ratio, patch } => write!(f, "mask:{ratio}:{patch}"),
        }
    }
}

/// Parses `blur:<sigma>`, `jpeg:<quality>` or `mask:<ratio>:<patch>`.
impl FromStr for PerturbSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| -> Result<f64> {
            t.parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("bad number {t:?} in {s:?}")))
        };
        let spec = match parts.as_slice() {
            ["blur", sigma] => Self::GaussianBlur { sigma: num(sigma)? },
            ["jpeg", q] => Self::Jpeg {
                quality: q
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("bad quality {q:?}")))?,
            },
            ["mask", ratio, patch] => Self::RandomMaskEval {
                ratio: num(ratio)?,
                patch: patch
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("bad patch size {patch:?}")))?,
            },
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "unknown perturbation {s:?}; expected blur:S, jpeg:Q or mask:R:D"
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}
