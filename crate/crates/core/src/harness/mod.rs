//! Datasets, metrics, perturbations, the toy synthesizer and evaluation.

mod dataset;
mod eval;
mod metrics;
mod perturb;
mod synth;

pub use dataset::{image_files, load_dataset, Dataset, LabeledSample, FAKE_DIR, REAL_DIR};
pub use metrics::{accuracy, average_precision};
pub use perturb::{gaussian_blur, gaussian_kernel, jpeg_roundtrip, PerturbSpec};
pub use synth::{natural_corpus, natural_image, synthesize_fake, NaturalConfig, SMOOTHING_KERNEL};
pub use eval::{evaluate, sample_key, score_sample, EvalOptions, EvalReport, SourceMetrics};
