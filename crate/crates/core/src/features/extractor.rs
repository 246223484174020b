use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::edge::{laplace, sobel, LaplaceVariant};
use super::spectral::{dct_highpass, default_dct_delta, fft_highpass};
use super::wavelet::{dwt2_single, extract_hh, FilterBank};
use crate::error::{Error, Result};
use crate::img::ImageTensor;

/// Which artifact map feeds the detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractorKind {
    Naive,
    DwtLl,
    DwtLh,
    DwtHl,
    DwtHh,
    FftHi,
    DctHi,
    Sobel,
    Laplace,
}

impl ExtractorKind {
    pub const ALL: [ExtractorKind; 9] = [
        Self::Naive,
        Self::DwtLl,
        Self::DwtLh,
        Self::DwtHl,
        Self::DwtHh,
        Self::FftHi,
        Self::DctHi,
        Self::Sobel,
        Self::Laplace,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Self::Naive => "naive",
            Self::DwtLl => "dwt_ll",
            Self::DwtLh => "dwt_lh",
            Self::DwtHl => "dwt_hl",
            Self::DwtHh => "dwt_hh",
            Self::FftHi => "fft_hi",
            Self::DctHi => "dct_hi",
            Self::Sobel => "sobel",
            Self::Laplace => "laplace",
        }
    }
}

impl fmt::Display for ExtractorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for ExtractorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.token() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown extractor {s:?}")))
    }
}

/// An extractor kind together with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extractor {
    pub kind: ExtractorKind,
    /// DCT threshold; `None` uses `(H + W) / 4`.
    pub dct_delta: Option<f64>,
    pub laplace_variant: LaplaceVariant,
    #[serde(skip)]
    pub filter_bank: FilterBank,
}

impl Extractor {
    pub fn new(kind: ExtractorKind) -> Self {
        Self {
            kind,
            dct_delta: None,
            laplace_variant: LaplaceVariant::default(),
            filter_bank: FilterBank::bior13(),
        }
    }

    pub fn apply(&self, x: &ImageTensor) -> Result<ImageTensor> {
        let fb = &self.filter_bank;
        match self.kind {
            ExtractorKind::Naive => Ok(x.clone()),
            ExtractorKind::DwtHh => extract_hh(x, fb),
            ExtractorKind::DwtLl => Ok(dwt2_single(x, fb)?.ll),
            ExtractorKind::DwtLh => Ok(dwt2_single(x, fb)?.lh),
            ExtractorKind::DwtHl => Ok(dwt2_single(x, fb)?.hl),
            ExtractorKind::FftHi => Ok(fft_highpass(x)),
            ExtractorKind::DctHi => {
                let delta = self
                    .dct_delta
                    .unwrap_or_else(|| default_dct_delta(x.height(), x.width()));
                dct_highpass(x, delta)
            }
            ExtractorKind::Sobel => Ok(sobel(x)),
            ExtractorKind::Laplace => Ok(laplace(x, self.laplace_variant)),
        }
    }
}

impl Default for Extractor {
    fn default() -> Self {
        Self::new(ExtractorKind::DwtHh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandStream;

    #[test]
    fn tokens_round_trip() {
        for k in ExtractorKind::ALL {
            assert_eq!(k.token().parse::<ExtractorKind>().unwrap(), k);
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(json, format!("\"{}\"", k.token()));
        }
        assert!("DWT_HH".parse::<ExtractorKind>().is_err());
    }

    #[test]
    fn every_extractor_is_linear() {
        let mut rng = RandStream::new(17);
        let x = ImageTensor::from_fn(3, 8, 8, |_, _, _| rng.next_f64());
        for kind in ExtractorKind::ALL {
            let mut e = Extractor::new(kind);
            for variant in [LaplaceVariant::Four, LaplaceVariant::Eight] {
                e.laplace_variant = variant;
                let base = e.apply(&x).unwrap();
                for a in [0.5, 2.0] {
                    let scaled = e.apply(&x.scale(a)).unwrap();
                    // Sobel magnitude is only positively homogeneous; a > 0 here.
                    assert!(scaled.max_abs_diff(&base.scale(a)) <= 1e-6, "{kind}");
                }
            }
        }
    }

    #[test]
    fn band_shapes() {
        let x = ImageTensor::zeros(3, 16, 12);
        for kind in ExtractorKind::ALL {
            let y = Extractor::new(kind).apply(&x).unwrap();
            let want = match kind {
                ExtractorKind::DwtLl | ExtractorKind::DwtLh | ExtractorKind::DwtHl | ExtractorKind::DwtHh => (3, 8, 6),
                _ => (3, 16, 12),
            };
            assert_eq!(y.shape(), want, "{kind}");
        }
    }
}
