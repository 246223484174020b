//! Out-of-range index handling for convolutions and padding.

/// Mirror index without repeating the edge sample (`x[-1] = x[1]`), folded
/// until it lands inside `0..n`. A length-1 axis always maps to 0.
#[inline]
pub fn reflect101(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let mut j = i.rem_euclid(period);
    if j >= n as isize {
        j = period - j;
    }
    j as usize
}

/// Half-sample symmetric index (`x[-1] = x[0]`), folded until it lands
/// inside `0..n`.
#[inline]
pub fn symmetric(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let j = i.rem_euclid(period);
    if j >= n as isize {
        (period - 1 - j) as usize
    } else {
        j as usize
    }
}

/// 3×3 cross-correlation of one plane with reflect-101 borders.
///
/// Accumulates `k · (p - center)` plus `sum(k) · center`, so zero-sum kernels
/// give exactly zero on flat regions.
pub fn correlate3x3(plane: &[f64], h: usize, w: usize, k: &[[f64; 3]; 3]) -> Vec<f64> {
    let ksum: f64 = k.iter().flatten().sum();
    let mut out = vec![0.0; h * w];
    for y in 0..h {
        let rows = [
            reflect101(y as isize - 1, h),
            y,
            reflect101(y as isize + 1, h),
        ];
        for x in 0..w {
            let cols = [
                reflect101(x as isize - 1, w),
                x,
                reflect101(x as isize + 1, w),
            ];
            let center = plane[y * w + x];
            let mut acc = 0.0;
            for (ky, &r) in rows.iter().enumerate() {
                for (kx, &c) in cols.iter().enumerate() {
                    acc += k[ky][kx] * (plane[r * w + c] - center);
                }
            }
            out[y * w + x] = acc + ksum * center;
        }
    }
    out
}
