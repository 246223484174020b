//! Artifact-feature extractors: wavelet sub-bands, spectral high-pass
//! filters and edge operators.

mod edge;
mod extractor;
mod spectral;
mod wavelet;

pub use edge::{laplace, sobel, LaplaceVariant, LAPLACE_4, LAPLACE_8, SOBEL_X, SOBEL_Y};
pub use extractor::{Extractor, ExtractorKind};
pub(crate) use spectral::fft2_inplace;
pub use spectral::{dct_highpass, default_dct_delta, fft_block_zeroed, fft_highpass, signed_freq};
pub use wavelet::{band_len, dwt2_raw, dwt2_single, extract_hh, FilterBank, SubBands};
