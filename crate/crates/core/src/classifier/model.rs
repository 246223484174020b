//! Logistic head over standardized features, BCE loss and the `SIDM` model
//! file.

use std::path::Path;

use super::featurize::{FeatureVector, FEATURE_DIM};
use crate::error::{Error, Result};
use crate::img::read_u32;

pub const SIDM_MAGIC: &[u8; 4] = b"SIDM";
/// Version 1: binary cross-entropy head.
pub const SIDM_VERSION: u32 = 1;
const LOGIT_CLAMP: f64 = 30.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Per-dimension standardization, frozen after the first training pass.
    pub feat_mean: Vec<f64>,
    pub feat_std: Vec<f64>,
}

impl Default for LogisticModel {
    fn default() -> Self {
        Self {
            weights: vec![0.0; FEATURE_DIM],
            bias: 0.0,
            feat_mean: vec![0.0; FEATURE_DIM],
            feat_std: vec![1.0; FEATURE_DIM],
        }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

impl LogisticModel {
    pub fn standardize(&self, f: &FeatureVector) -> [f64; FEATURE_DIM] {
        let mut z = [0.0; FEATURE_DIM];
        for (i, slot) in z.iter_mut().enumerate() {
            *slot = (f.0[i] - self.feat_mean[i]) / self.feat_std[i];
        }
        z
    }

    /// `w · standardize(f) + b`
    pub fn forward(&self, f: &FeatureVector) -> f64 {
        let z = self.standardize(f);
        self.weights.iter().zip(z).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    pub fn score(&self, f: &FeatureVector) -> f64 {
        sigmoid(self.forward(f))
    }

    /// Fake iff score >= 0.5.
    pub fn predict(&self, f: &FeatureVector) -> bool {
        self.score(f) >= 0.5
    }

    /// Fits the standardization to `features`; zero-variance dimensions get
    /// unit scale.
    pub fn fit_standardization(&mut self, features: &[FeatureVector]) {
        let n = features.len() as f64;
        for d in 0..FEATURE_DIM {
            let mean = features.iter().map(|f| f.0[d]).sum::<f64>() / n;
            let var = features.iter().map(|f| (f.0[d] - mean).powi(2)).sum::<f64>() / n;
            let std = var.sqrt();
            self.feat_mean[d] = mean;
            self.feat_std[d] = if std > 1e-12 { std } else { 1.0 };
        }
    }

    pub fn is_finite(&self) -> bool {
        self.weights
            .iter()
            .chain(&self.feat_mean)
            .chain(&self.feat_std)
            .chain(std::iter::once(&self.bias))
            .all(|v| v.is_finite())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + 8 * (3 * FEATURE_DIM + 1));
        out.extend_from_slice(SIDM_MAGIC);
        out.extend_from_slice(&SIDM_VERSION.to_le_bytes());
        out.extend_from_slice(&(FEATURE_DIM as u32).to_le_bytes());
        let values = self
            .weights
            .iter()
            .chain(std::iter::once(&self.bias))
            .chain(&self.feat_mean)
            .chain(&self.feat_std);
        for v in values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |offset, detail: String| Error::Format {
            format: "SIDM",
            offset,
            detail,
        };
        if bytes.get(..4) != Some(SIDM_MAGIC.as_slice()) {
            return Err(bad(0, "bad magic".into()));
        }
        let version = read_u32(bytes, 4, "SIDM")?;
        if version != SIDM_VERSION {
            return Err(bad(4, format!("unsupported version {version}")));
        }
        let dim = read_u32(bytes, 8, "SIDM")? as usize;
        if dim != FEATURE_DIM {
            return Err(bad(8, format!("dimension {dim}, expected {FEATURE_DIM}")));
        }
        let want = 12 + 8 * (3 * dim + 1);
        if bytes.len() != want {
            return Err(bad(
                12,
                format!("expected {want} bytes, found {}", bytes.len()),
            ));
        }
        let vals: Vec<f64> = bytes[12..]
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
            .collect();
        if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
            return Err(bad(12 + 8 * i, "non-finite parameter".into()));
        }
        if let Some(i) = vals[2 * dim + 1..].iter().position(|&s| s <= 0.0) {
            return Err(bad(
                12 + 8 * (2 * dim + 1 + i),
                "standardization scale must be positive".into(),
            ));
        }
        Ok(Self {
            weights: vals[..dim].to_vec(),
            bias: vals[dim],
            feat_mean: vals[dim + 1..2 * dim + 1].to_vec(),
            feat_std: vals[2 * dim + 1..].to_vec(),
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::from(e).at_path(path))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::from(e).at_path(path))?;
        Self::from_bytes(&bytes).map_err(|e| e.at_path(path))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossGrad {
    pub loss: f64,
    pub grad_w: Vec<f64>,
    pub grad_b: f64,
}

/// Mean binary cross-entropy with logits over the batch, and its gradient.
/// Logits are clamped to ±30; the gradient is zero past the clamp.
pub fn bce_loss_and_grad(
    model: &LogisticModel,
    features: &[FeatureVector],
    labels: &[u8],
) -> LossGrad {
    assert_eq!(features.len(), labels.len(), "batch length mismatch");
    let n = features.len().max(1) as f64;
    let mut out = LossGrad {
        loss: 0.0,
        grad_w: vec![0.0; FEATURE_DIM],
        grad_b: 0.0,
    };
    for (f, &y) in features.iter().zip(labels) {
        let z = model.standardize(f);
        let raw = model.weights.iter().zip(z).map(|(w, v)| w * v).sum::<f64>() + model.bias;
        let logit = raw.clamp(-LOGIT_CLAMP, LOGIT_CLAMP);
        let y = f64::from(y);
        out.loss += softplus(logit) - y * logit;
        if raw.abs() < LOGIT_CLAMP {
            let r = sigmoid(logit) - y;
            for (g, v) in out.grad_w.iter_mut().zip(z) {
                *g += r * v;
            }
            out.grad_b += r;
        }
    }
    out.loss /= n;
    out.grad_w.iter_mut().for_each(|g| *g /= n);
    out.grad_b /= n;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(v: f64) -> FeatureVector {
        FeatureVector([v; FEATURE_DIM])
    }

    #[test]
    fn zero_model_scores_half() {
        let m = LogisticModel::default();
        assert_eq!(m.score(&fv(3.7)), 0.5);
        let mut e1 = LogisticModel::default();
        e1.weights[0] = 1.0;
        let mut f = fv(5.0);
        f.0[0] = 0.0;
        assert_eq!(e1.score(&f), 0.5);
        assert!(e1.predict(&f));
    }

    #[test]
    fn forward_is_a_dot_product() {
        let mut m = LogisticModel::default();
        let mut f = fv(0.0);
        let mut want = 0.25;
        m.bias = 0.25;
        for i in 0..FEATURE_DIM {
            m.weights[i] = (i as f64 - 10.0) / 7.0;
            f.0[i] = (i as f64).sin();
            want += m.weights[i] * f.0[i];
        }
        assert!((m.forward(&f) - want).abs() < 1e-12);
    }

    #[test]
    fn balanced_zero_model_loss_is_ln2() {
        let m = LogisticModel::default();
        let g = bce_loss_and_grad(&m, &[fv(1.0), fv(-1.0)], &[0, 1]);
        assert!((g.loss - std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn confident_correct_loss_vanishes() {
        let mut m = LogisticModel {
            bias: 100.0,
            ..LogisticModel::default()
        };
        let g = bce_loss_and_grad(&m, &[fv(0.0)], &[1]);
        assert!(g.loss <= 1e-9);
        m.bias = -100.0;
        assert!(bce_loss_and_grad(&m, &[fv(0.0)], &[0]).loss <= 1e-9);
    }

    #[test]
    fn model_bytes_round_trip() {
        let mut m = LogisticModel::default();
        m.weights[3] = -1.5;
        m.bias = 0.125;
        m.feat_mean[27] = 2.0;
        m.feat_std[0] = 3.0;
        let b = m.to_bytes();
        assert_eq!(&b[..4], b"SIDM");
        assert_eq!(b.len(), 12 + 8 * 85);
        assert_eq!(LogisticModel::from_bytes(&b).unwrap(), m);
    }

    #[test]
    fn corrupt_models_rejected() {
        let b = LogisticModel::default().to_bytes();
        assert!(LogisticModel::from_bytes(&b[..b.len() - 8]).is_err());
        let mut dim = b.clone();
        dim[8] = 27;
        assert!(LogisticModel::from_bytes(&dim).is_err());
        let mut zero_std = b.clone();
        let last = zero_std.len() - 8;
        zero_std[last..].copy_from_slice(&0.0f64.to_le_bytes());
        assert!(LogisticModel::from_bytes(&zero_std).is_err());
        let mut nan = b;
        nan[12..20].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(LogisticModel::from_bytes(&nan).is_err());
    }
}
