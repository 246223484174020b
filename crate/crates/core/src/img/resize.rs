//! Resampling with the half-pixel-center convention (align-corners = false).

use super::tensor::ImageTensor;
use crate::error::{Error, Result};

#[inline]
fn source_coord(i: usize, in_len: usize, out_len: usize) -> f64 {
    (i as f64 + 0.5) * in_len as f64 / out_len as f64 - 0.5
}

fn check_size(out_h: usize, out_w: usize) -> Result<()> {
    if out_h == 0 || out_w == 0 {
        return Err(Error::Shape(format!(
            "resize target {out_h}x{out_w} must be at least 1x1"
        )));
    }
    Ok(())
}

/// Per-axis interpolation taps: (lower index, upper index, upper weight).
fn bilinear_taps(in_len: usize, out_len: usize) -> Vec<(usize, usize, f64)> {
    (0..out_len)
        .map(|i| {
            let s = source_coord(i, in_len, out_len).clamp(0.0, (in_len - 1) as f64);
            let i0 = s.floor() as usize;
            let i1 = (i0 + 1).min(in_len - 1);
            (i0, i1, s - i0 as f64)
        })
        .collect()
}

pub fn bilinear_resize(x: &ImageTensor, out_h: usize, out_w: usize) -> Result<ImageTensor> {
    check_size(out_h, out_w)?;
    let (_, h, w) = x.shape();
    if (h, w) == (out_h, out_w) {
        return Ok(x.clone());
    }
    let ty = bilinear_taps(h, out_h);
    let tx = bilinear_taps(w, out_w);
    Ok(x.map_planes(out_h, out_w, |p| {
        let mut out = Vec::with_capacity(out_h * out_w);
        for &(y0, y1, fy) in &ty {
            for &(x0, x1, fx) in &tx {
                let top = p[y0 * w + x0] * (1.0 - fx) + p[y0 * w + x1] * fx;
                let bot = p[y1 * w + x0] * (1.0 - fx) + p[y1 * w + x1] * fx;
                out.push(top * (1.0 - fy) + bot * fy);
            }
        }
        out
    }))
}

/// Nearest source index; exact ties go to the smaller index.
fn nearest_index(i: usize, in_len: usize, out_len: usize) -> usize {
    let s = source_coord(i, in_len, out_len);
    ((s - 0.5).ceil().max(0.0) as usize).min(in_len - 1)
}

pub fn nearest_resize(x: &ImageTensor, out_h: usize, out_w: usize) -> Result<ImageTensor> {
    check_size(out_h, out_w)?;
    let (_, h, w) = x.shape();
    let iy: Vec<usize> = (0..out_h).map(|i| nearest_index(i, h, out_h)).collect();
    let ix: Vec<usize> = (0..out_w).map(|i| nearest_index(i, w, out_w)).collect();
    Ok(x.map_planes(out_h, out_w, |p| {
        iy.iter()
            .flat_map(|&y| ix.iter().map(move |&x| p[y * w + x]))
            .collect()
    }))
}
