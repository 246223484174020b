//! Local correlation map: for every `w × w` window, the Pearson coefficient
//! between the window's column-mean vector and row-mean vector.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::img::{GrayImage, ImageTensor};

/// Window size used for feature extraction and analysis.
pub const DEFAULT_WINDOW: usize = 2;

/// `(H - w + 1) × (W - w + 1)` grid of coefficients in `[-1, 1]`; zero where a
/// window's mean vectors have no variance.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMap {
    height: usize,
    width: usize,
    window: usize,
    data: Vec<f64>,
}

impl CorrelationMap {
    /// Builds a map from explicit values, e.g. when summarizing a stored map.
    pub fn from_values(height: usize, width: usize, window: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != height * width {
            return Err(Error::Shape(format!(
                "{} values for a {height}x{width} map",
                data.len()
            )));
        }
        if data.iter().any(|v| !(-1.0..=1.0).contains(v)) {
            return Err(Error::Shape("correlation values must lie in [-1, 1]".into()));
        }
        Ok(Self {
            height,
            width,
            window,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, y: usize, x: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn mean(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn to_tensor(&self) -> ImageTensor {
        ImageTensor::new(1, self.height, self.width, self.data.clone())
            .expect("map values are finite")
    }
}

/// Relative spread below which a mean vector counts as constant. Means that
/// are equal in exact arithmetic can differ by an ulp after summation.
pub const FLAT_TOLERANCE: f64 = 1e-12;

#[inline]
fn spread_is_flat(lo: f64, hi: f64, max_abs: f64) -> bool {
    hi - lo <= FLAT_TOLERANCE * max_abs.max(1.0)
}

fn is_flat(v: &[f64]) -> bool {
    let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| {
        (lo.min(e), hi.max(e))
    });
    spread_is_flat(lo, hi, lo.abs().max(hi.abs()))
}

fn pearson(r: &[f64], c: &[f64]) -> f64 {
    if is_flat(r) || is_flat(c) {
        return 0.0;
    }
    if r.len() == 2 {
        // Two-point Pearson is the sign of the product of the differences.
        return ((r[1] - r[0]).signum() * (c[1] - c[0]).signum()).clamp(-1.0, 1.0);
    }
    let n = r.len() as f64;
    let mr = r.iter().sum::<f64>() / n;
    let mc = c.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in r.iter().zip(c) {
        let (da, db) = (a - mr, b - mc);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// `w = 2` specialization: same sums in the same order as the general loop,
/// so the output is identical.
fn pairs_map(img: &GrayImage, mh: usize, mw: usize) -> Vec<f64> {
    let w = img.width();
    let px = img.data();
    let mut data = Vec::with_capacity(mh * mw);
    for i in 0..mh {
        let (top, bottom) = (&px[i * w..(i + 1) * w], &px[(i + 1) * w..(i + 2) * w]);
        for j in 0..mw {
            let (a, b, c, d) = (top[j], top[j + 1], bottom[j], bottom[j + 1]);
            let (c0, c1) = ((a + c) * 0.5, (b + d) * 0.5);
            let (r0, r1) = ((a + b) * 0.5, (c + d) * 0.5);
            let flat = |p: f64, q: f64| spread_is_flat(p.min(q), p.max(q), p.abs().max(q.abs()));
            data.push(if flat(c0, c1) || flat(r0, r1) {
                0.0
            } else {
                (c1 - c0).signum() * (r1 - r0).signum()
            });
        }
    }
    data
}

pub fn local_correlation_map(img: &GrayImage, window: usize) -> Result<CorrelationMap> {
    let (h, w) = (img.height(), img.width());
    if window < 2 {
        return Err(Error::InvalidConfig(format!("window {window} must be >= 2")));
    }
    if h < window || w < window {
        return Err(Error::Shape(format!(
            "image {h}x{w} is smaller than the {window}x{window} window"
        )));
    }
    let (mh, mw) = (h - window + 1, w - window + 1);
    let data = if window == 2 {
        pairs_map(img, mh, mw)
    } else {
        windowed_map(img, window, mh, mw)
    };
    Ok(CorrelationMap {
        height: mh,
        width: mw,
        window,
        data,
    })
}

fn windowed_map(img: &GrayImage, window: usize, mh: usize, mw: usize) -> Vec<f64> {
    let inv = 1.0 / window as f64;
    let mut data = Vec::with_capacity(mh * mw);
    let mut col_means = vec![0.0; window];
    let mut row_means = vec![0.0; window];
    for i in 0..mh {
        for j in 0..mw {
            col_means.iter_mut().for_each(|v| *v = 0.0);
            row_means.iter_mut().for_each(|v| *v = 0.0);
            for (m, row) in row_means.iter_mut().enumerate() {
                for (k, col) in col_means.iter_mut().enumerate() {
                    let v = img.get(i + m, j + k);
                    *col += v;
                    *row += v;
                }
            }
            col_means.iter_mut().for_each(|v| *v *= inv);
            row_means.iter_mut().for_each(|v| *v *= inv);
            data.push(pearson(&col_means, &row_means));
        }
    }
    data
}

/// Mean coefficient and the fractions of negative / zero / positive values,
/// binned to the nearest of {-1, 0, +1} (exact for `w = 2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrSummary {
    pub mean: f64,
    pub frac_neg: f64,
    pub frac_zero: f64,
    pub frac_pos: f64,
}

impl CorrSummary {
    pub fn hist(&self) -> [f64; 3] {
        [self.frac_neg, self.frac_zero, self.frac_pos]
    }
}

pub fn corr_summary(map: &CorrelationMap) -> CorrSummary {
    let n = map.data.len();
    if n == 0 {
        return CorrSummary {
            mean: 0.0,
            frac_neg: 0.0,
            frac_zero: 1.0,
            frac_pos: 0.0,
        };
    }
    let (mut neg, mut pos) = (0usize, 0usize);
    for &v in &map.data {
        if v < -1.0 / 3.0 {
            neg += 1;
        } else if v > 1.0 / 3.0 {
            pos += 1;
        }
    }
    let zero = n - neg - pos;
    let n = n as f64;
    CorrSummary {
        mean: map.mean(),
        frac_neg: neg as f64 / n,
        frac_zero: zero as f64 / n,
        frac_pos: pos as f64 / n,
    }
}
