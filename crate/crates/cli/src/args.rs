use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sidforge::classifier::TrainConfig;
use sidforge::features::{Extractor, ExtractorKind, LaplaceVariant};
use sidforge::harness::PerturbSpec;
use sidforge::transforms::AugmentConfig;

#[derive(Debug, Parser)]
#[command(name = "sidforge", version, about = "Synthetic image detection toolkit")]
pub struct Cli {
    /// Global seed for every random stream
    #[arg(long, global = true, env = "SIDFORGE_SEED", default_value_t = 42)]
    pub seed: u64,

    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump the artifact map of one image as SIDT
    Extract(ExtractCmd),
    /// Summarize local correlation maps of an image or a folder as CSV
    Corrmap(CorrmapCmd),
    /// Write toy fakes for a folder of images, or generate a toy dataset
    Synth(SynthCmd),
    /// Train a detector head on a dataset
    Train(TrainCmd),
    /// Evaluate a trained model, optionally under a perturbation
    Eval(EvalCmd),
    /// Sweep one hyperparameter or perturbation strength
    Sweep(SweepCmd),
    /// Run the built-in oracle checks
    Selftest,
}

#[derive(Debug, Args)]
pub struct ExtractCmd {
    pub image: PathBuf,
    /// Center-crop to this size first
    #[arg(long)]
    pub crop: Option<usize>,
    #[command(flatten)]
    pub extractor: ExtractorArgs,
    /// Output SIDT file
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CorrmapCmd {
    /// Image file or folder of images
    pub input: PathBuf,
    /// Window size
    #[arg(long, default_value_t = 2)]
    pub window: usize,
    /// Also dump each map as SIDT into this folder
    #[arg(long)]
    pub maps: Option<PathBuf>,
    /// Output CSV (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthCmd {
    /// Folder of real images; fakes are written under --out with the same names
    #[arg(required_unless_present = "natural")]
    pub input: Option<PathBuf>,
    /// Instead, generate this many procedural real/fake pairs as a dataset
    #[arg(long, conflicts_with = "input")]
    pub natural: Option<usize>,
    /// Side length of generated images
    #[arg(long, default_value_t = 288)]
    pub size: usize,
    /// Source folder name for generated pairs
    #[arg(long, default_value = "toy")]
    pub source: String,
    /// Output folder
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainCmd {
    /// Dataset root with <source>/0_real and <source>/1_fake folders
    pub dataset: PathBuf,
    #[command(flatten)]
    pub aug: AugArgs,
    #[command(flatten)]
    pub extractor: ExtractorArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    /// Output model (SIDM)
    #[arg(long)]
    pub out: PathBuf,
    /// Per-epoch loss CSV (default: <out>.loss.csv)
    #[arg(long)]
    pub loss_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalCmd {
    pub dataset: PathBuf,
    /// Trained model (SIDM)
    #[arg(long)]
    pub model: PathBuf,
    /// Center-crop size
    #[arg(long, default_value_t = 256)]
    pub crop: usize,
    #[command(flatten)]
    pub extractor: ExtractorArgs,
    #[command(flatten)]
    pub perturb: PerturbArgs,
    #[command(flatten)]
    pub report: ReportArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    /// Jitter factor
    Alpha,
    /// Rotation range
    Beta,
    /// Mask patch size
    Patch,
    /// Maximum mask ratio
    MaxRatio,
    /// Evaluation blur sigma
    Sigma,
    /// Evaluation JPEG quality
    Quality,
    /// Evaluation mask ratio
    EvalMaskRatio,
    /// Evaluation mask patch size
    EvalPatch,
}

impl SweepParam {
    /// Training parameters need a model per value; the rest reuse one model.
    pub fn retrains(self) -> bool {
        matches!(self, Self::Alpha | Self::Beta | Self::Patch | Self::MaxRatio)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Alpha => "alpha",
            Self::Beta => "beta",
            Self::Patch => "patch",
            Self::MaxRatio => "max_ratio",
            Self::Sigma => "sigma",
            Self::Quality => "quality",
            Self::EvalMaskRatio => "eval_mask_ratio",
            Self::EvalPatch => "eval_patch",
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepCmd {
    /// Training dataset root
    #[arg(long)]
    pub train_set: PathBuf,
    /// Test dataset root
    #[arg(long)]
    pub test_set: PathBuf,
    #[arg(long, value_enum)]
    pub param: SweepParam,
    /// Comma-separated values
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
    #[command(flatten)]
    pub aug: AugArgs,
    #[command(flatten)]
    pub extractor: ExtractorArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    #[command(flatten)]
    pub perturb: PerturbArgs,
    /// Skip samples that cannot be decoded
    #[arg(long)]
    pub skip_bad: bool,
    /// Output CSV (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AugArgs {
    /// Augmentation config file (TOML); flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Crop size for training and evaluation [default: 256]
    #[arg(long)]
    pub crop: Option<usize>,
    /// Color jitter factor [default: 0.5]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Rotation range in degrees [default: 180]
    #[arg(long)]
    pub beta: Option<f64>,
    /// Probability of applying the random mask [default: 0.5]
    #[arg(long)]
    pub mask_prob: Option<f64>,
    /// Mask patch size [default: 16]
    #[arg(long)]
    pub patch: Option<usize>,
    /// Maximum masked fraction [default: 0.75]
    #[arg(long)]
    pub max_ratio: Option<f64>,
    /// Horizontal flip probability [default: 0.5]
    #[arg(long)]
    pub flip_prob: Option<f64>,
    /// Disable every augmentation (crop only)
    #[arg(long)]
    pub no_augment: bool,
}

impl AugArgs {
    pub fn resolve(&self) -> Result<AugmentConfig> {
        let mut cfg = match (&self.config, self.no_augment) {
            (Some(_), true) => bail!("--config and --no-augment are mutually exclusive"),
            (Some(path), false) => AugmentConfig::from_file(path)?,
            (None, true) => AugmentConfig::no_augment(),
            (None, false) => AugmentConfig::default(),
        };
        set(&mut cfg.crop_size, self.crop);
        set(&mut cfg.alpha, self.alpha);
        set(&mut cfg.beta, self.beta);
        set(&mut cfg.mask_prob, self.mask_prob);
        set(&mut cfg.patch_size, self.patch);
        set(&mut cfg.max_mask_ratio, self.max_ratio);
        set(&mut cfg.flip_prob, self.flip_prob);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct ExtractorArgs {
    /// Artifact extractor
    #[arg(long, default_value = "dwt_hh", value_parser = parse_kind)]
    pub extractor: ExtractorKind,
    /// DCT high-pass threshold [default: (H + W) / 4]
    #[arg(long)]
    pub delta: Option<f64>,
    /// Laplace kernel: 4 or 8 neighbors
    #[arg(long, default_value = "4", value_parser = parse_variant)]
    pub laplace_variant: LaplaceVariant,
}

impl ExtractorArgs {
    pub fn resolve(&self) -> Result<Extractor> {
        if let Some(d) = self.delta {
            if !(d >= 0.0 && d.is_finite()) {
                bail!("--delta must be a finite value >= 0, got {d}");
            }
        }
        let mut e = Extractor::new(self.extractor);
        e.dct_delta = self.delta;
        e.laplace_variant = self.laplace_variant;
        Ok(e)
    }
}

fn parse_kind(s: &str) -> Result<ExtractorKind, String> {
    s.parse().map_err(|e: sidforge::Error| e.to_string())
}

fn parse_variant(s: &str) -> Result<LaplaceVariant, String> {
    s.parse().map_err(|e: sidforge::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training config file (TOML); flags override it
    #[arg(long)]
    pub train_config: Option<PathBuf>,
    /// Epochs [default: 20]
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Batch size [default: 32]
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Peak learning rate [default: 0.005]
    #[arg(long)]
    pub lr: Option<f64>,
    /// AdamW weight decay [default: 0.01]
    #[arg(long)]
    pub weight_decay: Option<f64>,
    /// Linear warmup epochs [default: 1]
    #[arg(long)]
    pub warmup_epochs: Option<usize>,
}

impl TrainArgs {
    pub fn resolve(&self, seed: u64) -> Result<TrainConfig> {
        let mut cfg = match &self.train_config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
                toml::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?
            }
            None => TrainConfig::default(),
        };
        cfg.seed = seed;
        set(&mut cfg.epochs, self.epochs);
        set(&mut cfg.batch_size, self.batch_size);
        set(&mut cfg.lr, self.lr);
        set(&mut cfg.weight_decay, self.weight_decay);
        // A shorter run should not trip over the default warmup.
        match self.warmup_epochs {
            Some(w) => cfg.warmup_epochs = w,
            None => cfg.warmup_epochs = cfg.warmup_epochs.min(cfg.epochs),
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    /// Gaussian blur sigma applied before evaluation
    #[arg(long, conflicts_with_all = ["quality", "eval_mask_ratio"])]
    pub sigma: Option<f64>,
    /// JPEG quality applied before evaluation
    #[arg(long, conflicts_with = "eval_mask_ratio")]
    pub quality: Option<u8>,
    /// Fraction of the image masked before evaluation
    #[arg(long)]
    pub eval_mask_ratio: Option<f64>,
    /// Patch size of the evaluation mask
    #[arg(long, default_value_t = 16)]
    pub eval_patch: usize,
}

impl PerturbArgs {
    pub fn resolve(&self) -> Result<Option<PerturbSpec>> {
        let spec = if let Some(sigma) = self.sigma {
            Some(PerturbSpec::GaussianBlur { sigma })
        } else if let Some(quality) = self.quality {
            Some(PerturbSpec::Jpeg { quality })
        } else {
            self.eval_mask_ratio.map(|ratio| PerturbSpec::RandomMaskEval {
                ratio,
                patch: self.eval_patch,
            })
        };
        if let Some(p) = &spec {
            p.validate()?;
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Skip samples that cannot be decoded
    #[arg(long)]
    pub skip_bad: bool,
    /// Output report (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

fn set<T>(field: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *field = v;
    }
}
