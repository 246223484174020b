//! Sobel and Laplace edge operators, reflect-101 borders.

use serde::{Deserialize, Serialize};

use crate::img::{correlate3x3, ImageTensor};

pub const SOBEL_X: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
pub const SOBEL_Y: [[f64; 3]; 3] = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];
pub const LAPLACE_4: [[f64; 3]; 3] = [[0.0, 1.0, 0.0], [1.0, -4.0, 1.0], [0.0, 1.0, 0.0]];
pub const LAPLACE_8: [[f64; 3]; 3] = [[1.0, 1.0, 1.0], [1.0, -8.0, 1.0], [1.0, 1.0, 1.0]];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LaplaceVariant {
    #[default]
    #[serde(rename = "4")]
    Four,
    #[serde(rename = "8")]
    Eight,
}

impl LaplaceVariant {
    pub fn kernel(self) -> &'static [[f64; 3]; 3] {
        match self {
            LaplaceVariant::Four => &LAPLACE_4,
            LaplaceVariant::Eight => &LAPLACE_8,
        }
    }
}

impl std::str::FromStr for LaplaceVariant {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "4" => Ok(Self::Four),
            "8" => Ok(Self::Eight),
            other => Err(crate::Error::InvalidConfig(format!(
                "laplace variant must be 4 or 8, got {other:?}"
            ))),
        }
    }
}

/// Gradient magnitude `sqrt(gx² + gy²)` per channel.
pub fn sobel(x: &ImageTensor) -> ImageTensor {
    let (_, h, w) = x.shape();
    x.map_planes(h, w, |p| {
        let gx = correlate3x3(p, h, w, &SOBEL_X);
        let gy = correlate3x3(p, h, w, &SOBEL_Y);
        gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect()
    })
}

pub fn laplace(x: &ImageTensor, variant: LaplaceVariant) -> ImageTensor {
    let (_, h, w) = x.shape();
    x.map_planes(h, w, |p| correlate3x3(p, h, w, variant.kernel()))
}
