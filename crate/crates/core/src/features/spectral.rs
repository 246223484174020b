//! FFT and DCT high-pass extractors.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::img::ImageTensor;

/// Signed (centered) frequency of FFT bin `k` out of `n`.
#[inline]
pub fn signed_freq(k: usize, n: usize) -> isize {
    if k <= (n - 1) / 2 {
        k as isize
    } else {
        k as isize - n as isize
    }
}

/// True for bins removed by the FFT high-pass: `|i| < H/4` and `|j| < W/4`
/// in centered coordinates.
#[inline]
pub fn fft_block_zeroed(i: isize, j: isize, h: usize, w: usize) -> bool {
    (i.unsigned_abs() as f64) < h as f64 / 4.0 && (j.unsigned_abs() as f64) < w as f64 / 4.0
}

pub(crate) fn fft2_inplace(buf: &mut [Complex<f64>], h: usize, w: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let (row, col) = if inverse {
        (planner.plan_fft_inverse(w), planner.plan_fft_inverse(h))
    } else {
        (planner.plan_fft_forward(w), planner.plan_fft_forward(h))
    };
    for r in buf.chunks_exact_mut(w) {
        row.process(r);
    }
    let mut column = vec![Complex::default(); h];
    for x in 0..w {
        for y in 0..h {
            column[y] = buf[y * w + x];
        }
        col.process(&mut column);
        for y in 0..h {
            buf[y * w + x] = column[y];
        }
    }
}

/// Zeroes the centered low-frequency block of each channel's spectrum and
/// returns the real part of the inverse transform.
pub fn fft_highpass(x: &ImageTensor) -> ImageTensor {
    let (_, h, w) = x.shape();
    let scale = 1.0 / (h * w) as f64;
    x.map_planes(h, w, |p| {
        let mut buf: Vec<Complex<f64>> = p.iter().map(|&v| Complex::new(v, 0.0)).collect();
        fft2_inplace(&mut buf, h, w, false);
        for y in 0..h {
            let i = signed_freq(y, h);
            for xx in 0..w {
                if fft_block_zeroed(i, signed_freq(xx, w), h, w) {
                    buf[y * w + xx] = Complex::default();
                }
            }
        }
        fft2_inplace(&mut buf, h, w, true);
        buf.iter().map(|c| c.re * scale).collect()
    })
}

/// Orthonormal DCT-II basis: `m[k][n] = s_k cos(π (2n + 1) k / 2N)`.
fn dct_matrix(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for k in 0..n {
        let s = if k == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        for i in 0..n {
            m[k * n + i] = s * (PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64).cos();
        }
    }
    m
}

/// `a (r×k) · b (k×c)`.
fn matmul(a: &[f64], b: &[f64], r: usize, k: usize, c: usize) -> Vec<f64> {
    let mut out = vec![0.0; r * c];
    for i in 0..r {
        let row = &mut out[i * c..(i + 1) * c];
        for t in 0..k {
            let av = a[i * k + t];
            if av == 0.0 {
                continue;
            }
            for (o, bv) in row.iter_mut().zip(&b[t * c..(t + 1) * c]) {
                *o += av * bv;
            }
        }
    }
    out
}

fn transpose(a: &[f64], r: usize, c: usize) -> Vec<f64> {
    let mut out = vec![0.0; r * c];
    for i in 0..r {
        for j in 0..c {
            out[j * r + i] = a[i * c + j];
        }
    }
    out
}

/// Default DCT threshold: `(H + W) / 4`, i.e. `H/2` for square inputs.
pub fn default_dct_delta(h: usize, w: usize) -> f64 {
    (h + w) as f64 / 4.0
}

/// Zeroes DCT coefficients with `i + j < delta`, then inverts.
pub fn dct_highpass(x: &ImageTensor, delta: f64) -> Result<ImageTensor> {
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::InvalidConfig(format!("dct delta {delta} must be >= 0")));
    }
    let (_, h, w) = x.shape();
    let ch = dct_matrix(h);
    let cw = dct_matrix(w);
    let ch_t = transpose(&ch, h, h);
    let cw_t = transpose(&cw, w, w);
    Ok(x.map_planes(h, w, |p| {
        // Y = C_h X C_wᵀ
        let mut coef = matmul(&matmul(&ch, p, h, h, w), &cw_t, h, w, w);
        for i in 0..h {
            for j in 0..w {
                if ((i + j) as f64) < delta {
                    coef[i * w + j] = 0.0;
                }
            }
        }
        // X = C_hᵀ Y C_w
        matmul(&matmul(&ch_t, &coef, h, h, w), &cw, h, w, w)
    }))
}
