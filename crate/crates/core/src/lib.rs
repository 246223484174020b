//! Artifact-preserving preprocessing, artifact-invariant augmentation and
//! low-level artifact features for synthetic image detection.
//!
//! The pipeline is `crop → augment → extract → featurize → classify`:
//!
//! * [`img`]: planar float images, PNG/JPEG codecs, resampling, `SIDT` dumps.
//! * [`transforms`]: crops, flip, color jitter, rotation, patch masking.
//! * [`features`]: DWT sub-bands, FFT/DCT high-pass, Sobel/Laplace.
//! * [`corr`]: sliding-window local correlation maps.
//! * [`classifier`]: fixed statistics plus a logistic head trained with AdamW.
//! * [`harness`]: datasets, metrics, perturbations, the toy generator and
//!   evaluation loops.

pub mod classifier;
pub mod corr;
mod error;
pub mod features;
pub mod harness;
pub mod img;
pub mod rng;
pub mod selftest;
pub mod transforms;

pub use error::{Error, Result};
