//! Single-level separable 2-D DWT with half-sample symmetric extension.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::img::{symmetric, ImageTensor};

/// Analysis filter pair.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    pub dec_lo: Vec<f64>,
    pub dec_hi: Vec<f64>,
}

impl FilterBank {
    /// Biorthogonal 1.3 analysis filters, high-pass zero-padded to length 6.
    pub fn bior13() -> Self {
        let a = SQRT_2 / 16.0;
        let b = SQRT_2 / 2.0;
        Self {
            dec_lo: vec![-a, a, b, b, a, -a],
            dec_hi: vec![0.0, 0.0, -b, b, 0.0, 0.0],
        }
    }

    pub fn new(dec_lo: Vec<f64>, dec_hi: Vec<f64>) -> Result<Self> {
        if dec_lo.is_empty() || dec_lo.len() != dec_hi.len() {
            return Err(Error::InvalidConfig(
                "filter bank needs two non-empty filters of equal length".into(),
            ));
        }
        Ok(Self { dec_lo, dec_hi })
    }

    pub fn len(&self) -> usize {
        self.dec_lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dec_lo.is_empty()
    }
}

impl Default for FilterBank {
    fn default() -> Self {
        Self::bior13()
    }
}

/// The four sub-bands. `lh` is low-pass along rows (width) and high-pass
/// along columns (height), so horizontal edges land there; `hl` is the
/// transpose; `hh` is high-pass along both axes.
#[derive(Debug, Clone, PartialEq)]
pub struct SubBands {
    pub ll: ImageTensor,
    pub lh: ImageTensor,
    pub hl: ImageTensor,
    pub hh: ImageTensor,
}

/// Output length of one analysis pass: `floor((n + L - 1) / 2)`.
pub fn band_len(n: usize, filter_len: usize) -> usize {
    (n + filter_len - 1) / 2
}

/// Filters and decimates one signal: `out[i] = Σ_k f[k] · x[2i + 1 - k]`
/// with symmetric extension.
fn analyze(signal: &[f64], filter: &[f64], out: &mut Vec<f64>) {
    let n = signal.len();
    let len = band_len(n, filter.len());
    out.clear();
    for i in 0..len {
        let base = 2 * i as isize + 1;
        let mut acc = 0.0;
        for (k, &f) in filter.iter().enumerate() {
            if f != 0.0 {
                acc += f * signal[symmetric(base - k as isize, n)];
            }
        }
        out.push(acc);
    }
}

/// One plane through a row pass with `row_f` then a column pass with `col_f`.
fn analyze_plane(
    plane: &[f64],
    h: usize,
    w: usize,
    row_f: &[f64],
    col_f: &[f64],
) -> (Vec<f64>, usize, usize) {
    let ow = band_len(w, row_f.len());
    let oh = band_len(h, col_f.len());
    let mut rows = vec![0.0; h * ow];
    let mut buf = Vec::with_capacity(ow.max(oh));
    for y in 0..h {
        analyze(&plane[y * w..(y + 1) * w], row_f, &mut buf);
        rows[y * ow..(y + 1) * ow].copy_from_slice(&buf);
    }
    let mut out = vec![0.0; oh * ow];
    let mut col = vec![0.0; h];
    for x in 0..ow {
        for y in 0..h {
            col[y] = rows[y * ow + x];
        }
        analyze(&col, col_f, &mut buf);
        for (y, &v) in buf.iter().enumerate() {
            out[y * ow + x] = v;
        }
    }
    (out, oh, ow)
}

/// Untrimmed decomposition: each band is `floor((H+L-1)/2) × floor((W+L-1)/2)`.
pub fn dwt2_raw(x: &ImageTensor, fb: &FilterBank) -> SubBands {
    let (_, h, w) = x.shape();
    let band = |row_f: &[f64], col_f: &[f64]| {
        let oh = band_len(h, col_f.len());
        let ow = band_len(w, row_f.len());
        x.map_planes(oh, ow, |p| analyze_plane(p, h, w, row_f, col_f).0)
    };
    SubBands {
        ll: band(&fb.dec_lo, &fb.dec_lo),
        lh: band(&fb.dec_lo, &fb.dec_hi),
        hl: band(&fb.dec_hi, &fb.dec_lo),
        hh: band(&fb.dec_hi, &fb.dec_hi),
    }
}

fn center_trim(band: &ImageTensor, oh: usize, ow: usize) -> ImageTensor {
    let (_, h, w) = band.shape();
    let (top, left) = ((h - oh) / 2, (w - ow) / 2);
    ImageTensor::from_fn(band.channels(), oh, ow, |c, y, x| band.get(c, y + top, x + left))
}

fn check_even(x: &ImageTensor) -> Result<()> {
    let (_, h, w) = x.shape();
    if h % 2 != 0 || w % 2 != 0 {
        return Err(Error::Shape(format!(
            "DWT needs even dimensions, got {h}x{w}; crop to an even size first"
        )));
    }
    Ok(())
}

/// Single-level DWT, each band center-trimmed to `C × H/2 × W/2`.
pub fn dwt2_single(x: &ImageTensor, fb: &FilterBank) -> Result<SubBands> {
    check_even(x)?;
    let (_, h, w) = x.shape();
    let raw = dwt2_raw(x, fb);
    let (oh, ow) = (h / 2, w / 2);
    Ok(SubBands {
        ll: center_trim(&raw.ll, oh, ow),
        lh: center_trim(&raw.lh, oh, ow),
        hl: center_trim(&raw.hl, oh, ow),
        hh: center_trim(&raw.hh, oh, ow),
    })
}

/// The HH band alone; skips the other three passes.
pub fn extract_hh(x: &ImageTensor, fb: &FilterBank) -> Result<ImageTensor> {
    check_even(x)?;
    let (_, h, w) = x.shape();
    let oh = band_len(h, fb.len());
    let ow = band_len(w, fb.len());
    let raw = x.map_planes(oh, ow, |p| analyze_plane(p, h, w, &fb.dec_hi, &fb.dec_hi).0);
    Ok(center_trim(&raw, h / 2, w / 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn energy(x: &ImageTensor) -> f64 {
        x.data().iter().map(|v| v * v).sum()
    }

    #[test]
    fn filter_sums() {
        let fb = FilterBank::bior13();
        assert!((fb.dec_lo.iter().sum::<f64>() - SQRT_2).abs() < 1e-9);
        assert!(fb.dec_hi.iter().sum::<f64>().abs() < 1e-9);
        assert_eq!(fb.len(), 6);
    }

    #[test]
    fn raw_length() {
        assert_eq!(band_len(256, 6), 130);
        assert_eq!(band_len(8, 6), 6);
    }

    #[test]
    fn constant_image() {
        let x = ImageTensor::filled(3, 16, 16, 0.5);
        let b = dwt2_single(&x, &FilterBank::bior13()).unwrap();
        assert_eq!(b.ll.shape(), (3, 8, 8));
        assert!(b.ll.data().iter().all(|v| (v - 1.0).abs() < 1e-9));
        for band in [&b.lh, &b.hl, &b.hh] {
            assert!(band.data().iter().all(|v| v.abs() <= 1e-5));
        }
    }

    #[test]
    fn horizontal_step_lands_in_lh() {
        // The bior1.3 high-pass differences (even, odd) sample pairs, so the
        // step sits inside a pair.
        let x = ImageTensor::from_fn(1, 16, 16, |_, y, _| if y < 7 { 0.0 } else { 1.0 });
        let b = dwt2_single(&x, &FilterBank::bior13()).unwrap();
        assert!(energy(&b.lh) > 100.0 * energy(&b.hl).max(1e-12));
        assert!(energy(&b.hh) < 1e-12);
    }

    #[test]
    fn checkerboard_peaks_in_hh() {
        let x = ImageTensor::from_fn(1, 16, 16, |_, y, xx| ((y + xx) % 2) as f64);
        let b = dwt2_single(&x, &FilterBank::bior13()).unwrap();
        let hh = energy(&b.hh);
        // LL is excluded here: the 0/1 pattern's DC puts as much energy there.
        for other in [&b.lh, &b.hl] {
            assert!(hh > energy(other));
        }
        assert_eq!(extract_hh(&x, &FilterBank::bior13()).unwrap(), b.hh);
        let centered = x.map(|v| v - 0.5);
        let b = dwt2_single(&centered, &FilterBank::bior13()).unwrap();
        for other in [&b.ll, &b.lh, &b.hl] {
            assert!(energy(&b.hh) > energy(other));
        }
    }

    #[test]
    fn shape_contract() {
        let x = ImageTensor::zeros(3, 256, 256);
        assert_eq!(extract_hh(&x, &FilterBank::bior13()).unwrap().shape(), (3, 128, 128));
    }

    #[test]
    fn odd_dimensions_rejected() {
        let x = ImageTensor::zeros(1, 7, 8);
        assert!(dwt2_single(&x, &FilterBank::bior13()).is_err());
        assert!(extract_hh(&x, &FilterBank::bior13()).is_err());
    }
}
