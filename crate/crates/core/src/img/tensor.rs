use crate::error::{Error, Result};

/// Planar floating-point image, `channels × height × width`, row-major within
/// each channel plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageTensor {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl ImageTensor {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(Error::Shape(format!(
                "empty image {channels}x{height}x{width}"
            )));
        }
        if data.len() != channels * height * width {
            return Err(Error::Shape(format!(
                "data length {} does not match {channels}x{height}x{width}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Shape(format!("non-finite sample at index {i}")));
        }
        Ok(Self {
            channels,
            height,
            width,
            data,
        })
    }

    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        Self::filled(channels, height, width, 0.0)
    }

    pub fn filled(channels: usize, height: usize, width: usize, value: f64) -> Self {
        assert!(channels > 0 && height > 0 && width > 0, "empty image");
        Self {
            channels,
            height,
            width,
            data: vec![value; channels * height * width],
        }
    }

    /// Builds an image by evaluating `f(channel, row, col)` at every sample.
    pub fn from_fn(
        channels: usize,
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut out = Self::zeros(channels, height, width);
        for c in 0..channels {
            for y in 0..height {
                for x in 0..width {
                    out.data[(c * height + y) * width + x] = f(c, y, x);
                }
            }
        }
        out
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    /// `(channels, height, width)`
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, c: usize, y: usize, x: usize) -> f64 {
        self.data[(c * self.height + y) * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, c: usize, y: usize, x: usize, v: f64) {
        self.data[(c * self.height + y) * self.width + x] = v;
    }

    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.height * self.width;
        &self.data[c * n..(c + 1) * n]
    }

    pub fn plane_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.height * self.width;
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn planes(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.height * self.width)
    }

    /// Builds an image from one plane per channel; every plane must hold `height * width` samples.
    pub fn from_planes(height: usize, width: usize, planes: Vec<Vec<f64>>) -> Result<Self> {
        let channels = planes.len();
        let data = planes.into_iter().flatten().collect();
        Self::new(channels, height, width, data)
    }

    /// Applies `f` plane by plane, producing an image of whatever per-plane
    /// size `f` returns.
    pub(crate) fn map_planes(
        &self,
        height: usize,
        width: usize,
        mut f: impl FnMut(&[f64]) -> Vec<f64>,
    ) -> Self {
        let mut data = Vec::with_capacity(self.channels * height * width);
        for plane in self.planes() {
            let out = f(plane);
            debug_assert_eq!(out.len(), height * width);
            data.extend(out);
        }
        Self {
            channels: self.channels,
            height,
            width,
            data,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            data: self.data.iter().map(|&v| f(v)).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    pub fn clamp01(&mut self) {
        for v in &mut self.data {
            *v = v.clamp(0.0, 1.0);
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Single-channel image.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        let t = ImageTensor::new(1, height, width, data)?;
        Ok(Self::from_single_channel(t))
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            data: vec![0.0; height * width],
        }
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(height * width);
        for y in 0..height {
            for x in 0..width {
                data.push(f(y, x));
            }
        }
        Self {
            height,
            width,
            data,
        }
    }

    fn from_single_channel(t: ImageTensor) -> Self {
        debug_assert_eq!(t.channels, 1);
        Self {
            height: t.height,
            width: t.width,
            data: t.data,
        }
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }
}

impl From<GrayImage> for ImageTensor {
    fn from(g: GrayImage) -> Self {
        ImageTensor {
            channels: 1,
            height: g.height,
            width: g.width,
            data: g.data,
        }
    }
}

/// BT.601 luma weights for R, G, B.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// Converts to grayscale. One-channel input passes through unchanged.
pub fn to_gray(x: &ImageTensor) -> Result<GrayImage> {
    match x.channels() {
        1 => Ok(GrayImage::from_single_channel(x.clone())),
        3 => {
            let (r, g, b) = (x.plane(0), x.plane(1), x.plane(2));
            let data = r
                .iter()
                .zip(g)
                .zip(b)
                .map(|((r, g), b)| LUMA_WEIGHTS[0] * r + LUMA_WEIGHTS[1] * g + LUMA_WEIGHTS[2] * b)
                .collect();
            Ok(GrayImage {
                height: x.height(),
                width: x.width(),
                data,
            })
        }
        c => Err(Error::UnsupportedChannels(c)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_lengths_and_non_finite() {
        assert!(ImageTensor::new(1, 2, 2, vec![0.0; 3]).is_err());
        assert!(ImageTensor::new(1, 1, 1, vec![f64::NAN]).is_err());
        assert!(ImageTensor::new(0, 1, 1, vec![]).is_err());
    }

    #[test]
    fn gray_of_gray_pixels_is_constant() {
        let x = ImageTensor::filled(3, 3, 4, 0.37);
        let g = to_gray(&x).unwrap();
        for &v in g.data() {
            assert!((v - 0.37).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_red_maps_to_red_weight() {
        let x = ImageTensor::from_fn(3, 1, 1, |c, _, _| if c == 0 { 1.0 } else { 0.0 });
        assert_eq!(to_gray(&x).unwrap().data(), &[0.299]);
    }

    #[test]
    fn four_channels_rejected() {
        let x = ImageTensor::zeros(4, 2, 2);
        assert!(matches!(to_gray(&x), Err(Error::UnsupportedChannels(4))));
    }

    #[test]
    fn single_channel_passthrough() {
        let x = ImageTensor::from_fn(1, 2, 3, |_, y, x| (y * 3 + x) as f64 / 10.0);
        let g = to_gray(&x).unwrap();
        assert_eq!(g.data(), x.data());
    }
}
