//! Fixed artifact statistics fed to the logistic head.
//!
//! Layout (28 slots):
//! * `0..9`: per channel `[mean|v|, std, excess kurtosis]` of the artifact map
//!   (one-channel maps are replicated into all three channel slots);
//! * `9..25`: 4×4 grid of channel-averaged `mean|v|`, row-major;
//! * `25..28`: fractions of correlation values at -1 / 0 / +1.

use crate::corr::{corr_summary, CorrelationMap};
use crate::error::{Error, Result};
use crate::img::ImageTensor;

pub const FEATURE_DIM: usize = 28;
pub const GRID: usize = 4;
pub const CHANNEL_SLOTS: std::ops::Range<usize> = 0..9;
pub const GRID_SLOTS: std::ops::Range<usize> = 9..25;
pub const HIST_SLOTS: std::ops::Range<usize> = 25..28;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; FEATURE_DIM]);

impl FeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Indices of the slots that scale linearly with the artifact map
    /// (mean|v|, std and the grid).
    pub fn magnitude_slots() -> impl Iterator<Item = usize> {
        (0..3).flat_map(|c| [3 * c, 3 * c + 1]).chain(GRID_SLOTS)
    }

    pub fn kurtosis_slots() -> impl Iterator<Item = usize> {
        (0..3).map(|c| 3 * c + 2)
    }
}

/// `[mean|v|, std, excess kurtosis]` of one plane. Kurtosis is 0 for a
/// constant plane.
fn moments(p: &[f64]) -> [f64; 3] {
    let n = p.len() as f64;
    let mean_abs = p.iter().map(|v| v.abs()).sum::<f64>() / n;
    if p.iter().all(|&v| v == p[0]) {
        return [mean_abs, 0.0, 0.0];
    }
    let mean = p.iter().sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &v in p {
        let d = (v - mean) * (v - mean);
        m2 += d;
        m4 += d * d;
    }
    m2 /= n;
    m4 /= n;
    if m2 == 0.0 {
        return [mean_abs, 0.0, 0.0];
    }
    [mean_abs, m2.sqrt(), m4 / (m2 * m2) - 3.0]
}

/// Cell boundaries along one axis: equal floor-sized cells, the remainder
/// going to the last cell.
fn cell_bounds(len: usize) -> [(usize, usize); GRID] {
    let step = len / GRID;
    let mut b = [(0, 0); GRID];
    for (i, slot) in b.iter_mut().enumerate() {
        let end = if i == GRID - 1 { len } else { (i + 1) * step };
        *slot = (i * step, end);
    }
    b
}

pub fn featurize(map: &ImageTensor, corr: &CorrelationMap) -> Result<FeatureVector> {
    let (c, h, w) = map.shape();
    if c != 1 && c != 3 {
        return Err(Error::UnsupportedChannels(c));
    }
    let mut f = [0.0; FEATURE_DIM];

    let stats: Vec<[f64; 3]> = map.planes().map(moments).collect();
    for slot in 0..3 {
        let s = stats[if c == 1 { 0 } else { slot }];
        f[3 * slot..3 * slot + 3].copy_from_slice(&s);
    }

    let mut avg_abs = vec![0.0; h * w];
    for p in map.planes() {
        for (a, v) in avg_abs.iter_mut().zip(p) {
            *a += v.abs();
        }
    }
    for a in &mut avg_abs {
        *a /= c as f64;
    }
    let (rows, cols) = (cell_bounds(h), cell_bounds(w));
    for (gy, &(y0, y1)) in rows.iter().enumerate() {
        for (gx, &(x0, x1)) in cols.iter().enumerate() {
            let count = (y1 - y0) * (x1 - x0);
            if count == 0 {
                continue;
            }
            let sum: f64 = (y0..y1)
                .map(|y| avg_abs[y * w + x0..y * w + x1].iter().sum::<f64>())
                .sum();
            f[GRID_SLOTS.start + gy * GRID + gx] = sum / count as f64;
        }
    }

    let hist = corr_summary(corr).hist();
    f[HIST_SLOTS].copy_from_slice(&hist);
    Ok(FeatureVector(f))
}
