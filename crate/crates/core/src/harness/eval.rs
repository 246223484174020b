use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, LabeledSample};
use super::metrics::{accuracy, average_precision};
use super::perturb::PerturbSpec;
use crate::classifier::{eval_view, view_features, LogisticModel};
use crate::error::{Error, Result};
use crate::features::Extractor;
use crate::rng::fnv1a;

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub crop: usize,
    pub seed: u64,
    /// Skip samples that fail to decode or transform instead of aborting.
    pub skip_bad: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            crop: 256,
            seed: 42,
            skip_bad: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceMetrics {
    pub source_id: String,
    pub n: usize,
    pub acc: f64,
    pub ap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub sources: Vec<SourceMetrics>,
    pub total: usize,
    pub acc_m: f64,
    pub ap_m: f64,
    /// Samples skipped because they could not be processed.
    pub failed: usize,
}

impl EvalReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("source_id,n,acc,ap\n");
        for s in &self.sources {
            let _ = writeln!(out, "{},{},{:.6},{:.6}", s.source_id, s.n, s.acc, s.ap);
        }
        let _ = writeln!(out, "MACRO,{},{:.6},{:.6}", self.total, self.acc_m, self.ap_m);
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Stable per-sample key independent of where the dataset lives on disk.
pub fn sample_key(s: &LabeledSample) -> u64 {
    let name = s
        .path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    fnv1a(format!("{}/{}/{}", s.source_id, s.label, name).as_bytes())
}

/// Score of one sample: optional perturbation on the full image, center
/// crop, artifact features, logistic head.
pub fn score_sample(
    model: &LogisticModel,
    sample: &LabeledSample,
    extractor: &Extractor,
    perturb: Option<&PerturbSpec>,
    opts: &EvalOptions,
) -> Result<f64> {
    let mut x = sample.load()?;
    if let Some(p) = perturb {
        x = p.apply(&x, opts.seed, sample_key(sample))?;
    }
    let f = view_features(&eval_view(&x, opts.crop), extractor)?;
    Ok(model.score(&f))
}

/// Per-source ACC / AP and their unweighted means.
pub fn evaluate(
    model: &LogisticModel,
    dataset: &Dataset,
    extractor: &Extractor,
    perturb: Option<&PerturbSpec>,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    if let Some(p) = perturb {
        p.validate()?;
    }
    let mut samples = dataset.samples.clone();
    samples.sort_by(|a, b| (&a.source_id, &a.path).cmp(&(&b.source_id, &b.path)));
    let scored: Vec<Result<f64>> = samples
        .par_iter()
        .map(|s| {
            score_sample(model, s, extractor, perturb, opts).map_err(|e| e.at_path(&s.path))
        })
        .collect();

    let mut failed = 0;
    let mut kept: Vec<(&LabeledSample, f64)> = Vec::with_capacity(samples.len());
    for (s, r) in samples.iter().zip(scored) {
        match r {
            Ok(score) => kept.push((s, score)),
            Err(e) if opts.skip_bad => {
                log::warn!("skipping sample: {e}");
                failed += 1;
            }
            Err(e) => return Err(e),
        }
    }
    if kept.is_empty() {
        return Err(Error::Dataset("no samples could be evaluated".into()));
    }

    let mut sources = Vec::new();
    let mut start = 0;
    while start < kept.len() {
        let id = &kept[start].0.source_id;
        let end = start + kept[start..].iter().take_while(|(s, _)| &s.source_id == id).count();
        let scores: Vec<f64> = kept[start..end].iter().map(|(_, v)| *v).collect();
        let labels: Vec<u8> = kept[start..end].iter().map(|(s, _)| s.label).collect();
        let ap = average_precision(&scores, &labels)
            .map_err(|e| Error::Metric(format!("source {id}: {e}")))?;
        sources.push(SourceMetrics {
            source_id: id.clone(),
            n: end - start,
            acc: accuracy(&scores, &labels, 0.5)?,
            ap,
        });
        start = end;
    }
    let k = sources.len() as f64;
    Ok(EvalReport {
        acc_m: sources.iter().map(|s| s.acc).sum::<f64>() / k,
        ap_m: sources.iter().map(|s| s.ap).sum::<f64>() / k,
        total: kept.len(),
        sources,
        failed,
    })
}
