//! Patch-based random masking on a `d × d` grid.

use super::config::AugmentConfig;
use crate::error::{Error, Result};
use crate::img::{GrayImage, ImageTensor};
use crate::rng::RandStream;

/// Number of patches for mask ratio `r`: `floor(H·W·r / d²)`, capped at the
/// number of whole grid cells.
pub fn patch_count(h: usize, w: usize, d: usize, ratio: f64) -> usize {
    let n = ((h * w) as f64 * ratio / (d * d) as f64).floor() as usize;
    n.min((h / d) * (w / d))
}

/// Zeroes the given grid cells (row-major cell indices over the
/// `floor(H/d) × floor(W/d)` grid) in every channel. Returns the image and the
/// binary mask (1 = masked).
pub fn apply_cells(x: &ImageTensor, d: usize, cells: &[usize]) -> (ImageTensor, GrayImage) {
    let (_, h, w) = x.shape();
    let grid_w = w / d;
    let mut out = x.clone();
    let mut mask = GrayImage::zeros(h, w);
    for &cell in cells {
        let (top, left) = ((cell / grid_w) * d, (cell % grid_w) * d);
        for y in top..top + d {
            for xx in left..left + d {
                mask.set(y, xx, 1.0);
            }
        }
    }
    for c in 0..x.channels() {
        for (v, m) in out.plane_mut(c).iter_mut().zip(mask.data()) {
            if *m == 1.0 {
                *v = 0.0;
            }
        }
    }
    (out, mask)
}

/// Masks `patch_count(H, W, d, ratio)` distinct grid cells chosen uniformly.
pub fn mask_with_ratio(
    x: &ImageTensor,
    d: usize,
    ratio: f64,
    rng: &mut RandStream,
) -> Result<(ImageTensor, GrayImage)> {
    let (_, h, w) = x.shape();
    if d == 0 || d > h.min(w) {
        return Err(Error::InvalidConfig(format!(
            "patch size {d} must lie in 1..={}",
            h.min(w)
        )));
    }
    let n = patch_count(h, w, d, ratio);
    let cells = rng.distinct((h / d) * (w / d), n);
    Ok(apply_cells(x, d, &cells))
}

/// With probability `mask_prob`, draws `r ~ U[0, max_mask_ratio]` and masks
/// that fraction; otherwise returns the input and an all-zero mask.
pub fn random_mask(
    x: &ImageTensor,
    cfg: &AugmentConfig,
    rng: &mut RandStream,
) -> Result<(ImageTensor, GrayImage)> {
    let d = cfg.patch_size;
    if d == 0 || d > x.height().min(x.width()) {
        return Err(Error::InvalidConfig(format!(
            "patch size {d} exceeds image {}x{}",
            x.height(),
            x.width()
        )));
    }
    if !rng.bernoulli(cfg.mask_prob) {
        return Ok((x.clone(), GrayImage::zeros(x.height(), x.width())));
    }
    let ratio = rng.uniform(0.0, cfg.max_mask_ratio);
    mask_with_ratio(x, d, ratio, rng)
}
