//! Crops, flips and rotation. Crops copy samples; they never resample.

use crate::img::{reflect101, ImageTensor};
use crate::rng::RandStream;

/// Reflect-pads (without repeating the edge) so both sides are at least
/// `size`. Padding is split evenly, extra pixel on the bottom/right.
pub fn pad_to_min(x: &ImageTensor, size: usize) -> ImageTensor {
    let (c, h, w) = x.shape();
    if h >= size && w >= size {
        return x.clone();
    }
    let (nh, nw) = (h.max(size), w.max(size));
    let (top, left) = ((nh - h) / 2, (nw - w) / 2);
    ImageTensor::from_fn(c, nh, nw, |ch, y, xx| {
        let sy = reflect101(y as isize - top as isize, h);
        let sx = reflect101(xx as isize - left as isize, w);
        x.get(ch, sy, sx)
    })
}

/// Copies the `size × size` window whose top-left corner is `(top, left)`.
///
/// # Panics
/// If the window does not fit.
pub fn crop_at(x: &ImageTensor, size: usize, top: usize, left: usize) -> ImageTensor {
    let (c, h, w) = x.shape();
    assert!(top + size <= h && left + size <= w, "crop window out of bounds");
    let mut data = Vec::with_capacity(c * size * size);
    for plane in x.planes() {
        for y in top..top + size {
            data.extend_from_slice(&plane[y * w + left..y * w + left + size]);
        }
    }
    ImageTensor::new(c, size, size, data).expect("crop preserves finiteness")
}

pub fn random_crop(x: &ImageTensor, size: usize, rng: &mut RandStream) -> ImageTensor {
    let x = pad_to_min(x, size);
    let top = rng.up_to(x.height() - size);
    let left = rng.up_to(x.width() - size);
    crop_at(&x, size, top, left)
}

pub fn center_crop(x: &ImageTensor, size: usize) -> ImageTensor {
    let x = pad_to_min(x, size);
    crop_at(&x, size, (x.height() - size) / 2, (x.width() - size) / 2)
}

pub fn horizontal_flip(x: &ImageTensor) -> ImageTensor {
    let w = x.width();
    ImageTensor::from_fn(x.channels(), x.height(), w, |c, y, xx| x.get(c, y, w - 1 - xx))
}

pub fn vertical_flip(x: &ImageTensor) -> ImageTensor {
    let h = x.height();
    ImageTensor::from_fn(x.channels(), h, x.width(), |c, y, xx| x.get(c, h - 1 - y, xx))
}

/// Flips with probability `p`.
pub fn random_horizontal_flip(x: &ImageTensor, p: f64, rng: &mut RandStream) -> ImageTensor {
    if rng.bernoulli(p) {
        horizontal_flip(x)
    } else {
        x.clone()
    }
}

#[inline]
fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() < 1e-9 {
        r
    } else {
        v
    }
}

/// Rotates by `degrees` (counter-clockwise as displayed) about the image
/// center, sampling bilinearly by inverse mapping. Source taps that fall
/// outside the image contribute zero.
pub fn rotate(x: &ImageTensor, degrees: f64) -> ImageTensor {
    if degrees == 0.0 {
        return x.clone();
    }
    let (_, h, w) = x.shape();
    let (sin, cos) = degrees.to_radians().sin_cos();
    let (cy, cx) = ((h as f64 - 1.0) / 2.0, (w as f64 - 1.0) / 2.0);

    // One tap list per output pixel, shared by every channel.
    let mut taps: Vec<[(usize, f64); 4]> = Vec::with_capacity(h * w);
    for y in 0..h {
        for xx in 0..w {
            let (dy, dx) = (y as f64 - cy, xx as f64 - cx);
            let sy = snap(cy + sin * dx + cos * dy);
            let sx = snap(cx + cos * dx - sin * dy);
            let (y0, x0) = (sy.floor(), sx.floor());
            let (fy, fx) = (sy - y0, sx - x0);
            let mut t = [(0usize, 0.0f64); 4];
            let corners = [
                (y0, x0, (1.0 - fy) * (1.0 - fx)),
                (y0, x0 + 1.0, (1.0 - fy) * fx),
                (y0 + 1.0, x0, fy * (1.0 - fx)),
                (y0 + 1.0, x0 + 1.0, fy * fx),
            ];
            for (slot, (py, px, wgt)) in t.iter_mut().zip(corners) {
                if wgt != 0.0 && py >= 0.0 && px >= 0.0 && py < h as f64 && px < w as f64 {
                    *slot = (py as usize * w + px as usize, wgt);
                }
            }
            taps.push(t);
        }
    }

    x.map_planes(h, w, |p| {
        taps.iter()
            .map(|t| t.iter().map(|&(i, wgt)| wgt * p[i]).sum())
            .collect()
    })
}

/// Rotation by an angle drawn from `U[-beta, +beta]` degrees.
pub fn random_rotation(x: &ImageTensor, beta: f64, rng: &mut RandStream) -> ImageTensor {
    let theta = rng.uniform(-beta, beta);
    rotate(x, theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(c: usize, h: usize, w: usize) -> ImageTensor {
        ImageTensor::from_fn(c, h, w, |ch, y, x| ((ch * h + y) * w + x) as f64 / (c * h * w) as f64)
    }

    #[test]
    fn full_size_crops_are_identity() {
        let x = ramp(3, 6, 6);
        assert_eq!(center_crop(&x, 6), x);
        assert_eq!(random_crop(&x, 6, &mut RandStream::new(1)), x);
    }

    #[test]
    fn center_crop_offsets() {
        let x = ramp(1, 4, 4);
        let y = center_crop(&x, 2);
        assert_eq!(y.data(), &[x.get(0, 1, 1), x.get(0, 1, 2), x.get(0, 2, 1), x.get(0, 2, 2)]);
        let x5 = ramp(1, 5, 5);
        let y5 = center_crop(&x5, 2);
        assert_eq!(y5, crop_at(&x5, 2, 1, 1));
    }

    #[test]
    fn crop_at_copies_the_sub_block() {
        let x = ramp(1, 4, 4);
        let y = crop_at(&x, 2, 1, 1);
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(y.get(0, r, c), x.get(0, r + 1, c + 1));
            }
        }
    }

    #[test]
    fn small_inputs_are_reflect_padded() {
        let x = ramp(1, 3, 5);
        let y = center_crop(&x, 6);
        assert_eq!(y.shape(), (1, 6, 6));
        // Every output sample is an input sample.
        for &v in y.data() {
            assert!(x.data().contains(&v));
        }
        let p = pad_to_min(&x, 5);
        assert_eq!(p.shape(), (1, 5, 5));
        for y in 0..3 {
            for xx in 0..5 {
                assert_eq!(p.get(0, y + 1, xx), x.get(0, y, xx));
            }
        }
    }

    #[test]
    fn flip_reverses_columns() {
        let x = ImageTensor::new(1, 1, 2, vec![0.25, 0.75]).unwrap();
        assert_eq!(horizontal_flip(&x).data(), &[0.75, 0.25]);
        let y = ramp(3, 4, 5);
        assert_eq!(horizontal_flip(&horizontal_flip(&y)), y);
        let k = ImageTensor::filled(3, 4, 4, 0.3);
        assert_eq!(horizontal_flip(&k), k);
    }

    #[test]
    fn rotation_zero_is_identity() {
        let x = ramp(3, 5, 7);
        assert_eq!(rotate(&x, 0.0), x);
        assert_eq!(random_rotation(&x, 0.0, &mut RandStream::new(9)), x);
    }

    #[test]
    fn half_turn_is_double_flip() {
        for n in [4, 5] {
            let x = ramp(2, n, n);
            let want = vertical_flip(&horizontal_flip(&x));
            assert_eq!(rotate(&x, 180.0), want);
            assert_eq!(rotate(&x, -180.0), want);
        }
    }

    #[test]
    fn quarter_turn_is_transpose_reverse() {
        let n = 6;
        let x = ramp(1, n, n);
        let y = rotate(&x, 90.0);
        for r in 0..n {
            for c in 0..n {
                assert!((y.get(0, r, c) - x.get(0, c, n - 1 - r)).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn fill_outside_is_zero() {
        let x = ImageTensor::filled(1, 9, 9, 1.0);
        let y = rotate(&x, 45.0);
        assert_eq!(y.get(0, 0, 0), 0.0);
        assert_eq!(y.get(0, 4, 4), 1.0);
    }
}
