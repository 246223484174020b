//! Brute-force reference implementations and the checks that compare the
//! library against them. Used by the test suites and the `selftest` command.

use std::f64::consts::PI;

use serde::Deserialize;

use crate::classifier::{
    adamw_step, bce_loss_and_grad, featurize, AdamState, FeatureVector, LogisticModel, LossGrad,
    TrainConfig, FEATURE_DIM,
};
use crate::corr::{corr_summary, local_correlation_map, CorrelationMap, FLAT_TOLERANCE};
use crate::features::{
    dct_highpass, default_dct_delta, dwt2_raw, dwt2_single, fft_highpass, FilterBank,
};
use crate::harness::{accuracy, average_precision};
use crate::img::{GrayImage, ImageTensor};
use crate::rng::RandStream;

/// Outcome of one oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }
}

pub fn random_image(c: usize, h: usize, w: usize, rng: &mut RandStream) -> ImageTensor {
    ImageTensor::from_fn(c, h, w, |_, _, _| rng.next_f64())
}

// ---------------------------------------------------------------- oracles

/// Textbook two-pass Pearson coefficient; a constant vector (spread within
/// [`FLAT_TOLERANCE`] of its magnitude) gives 0.
pub fn pearson_oracle(a: &[f64], b: &[f64]) -> f64 {
    let flat = |v: &[f64]| {
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let scale = v.iter().map(|e| e.abs()).fold(1.0, f64::max);
        hi - lo <= FLAT_TOLERANCE * scale
    };
    if flat(a) || flat(b) {
        return 0.0;
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// Per-window Pearson between column means and row means.
pub fn corr_map_oracle(img: &GrayImage, w: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..=img.height() - w {
        for j in 0..=img.width() - w {
            let cols: Vec<f64> = (0..w)
                .map(|k| (0..w).map(|m| img.get(i + m, j + k)).sum::<f64>() / w as f64)
                .collect();
            let rows: Vec<f64> = (0..w)
                .map(|m| (0..w).map(|k| img.get(i + m, j + k)).sum::<f64>() / w as f64)
                .collect();
            out.push(pearson_oracle(&cols, &rows));
        }
    }
    out
}

fn signed(k: usize, n: usize) -> f64 {
    if 2 * k < n || (2 * k == n && n % 2 == 1) {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Direct O(N⁴) DFT high-pass: zero `|u| < H/4 && |v| < W/4`, invert, real part.
pub fn fft_highpass_oracle(plane: &[f64], h: usize, w: usize) -> Vec<f64> {
    let mut re = vec![0.0; h * w];
    let mut im = vec![0.0; h * w];
    for u in 0..h {
        for v in 0..w {
            let (mut sr, mut si) = (0.0, 0.0);
            for y in 0..h {
                for x in 0..w {
                    let ang = -2.0 * PI * ((u * y) as f64 / h as f64 + (v * x) as f64 / w as f64);
                    sr += plane[y * w + x] * ang.cos();
                    si += plane[y * w + x] * ang.sin();
                }
            }
            if !(signed(u, h).abs() < h as f64 / 4.0 && signed(v, w).abs() < w as f64 / 4.0) {
                re[u * w + v] = sr;
                im[u * w + v] = si;
            }
        }
    }
    let mut out = vec![0.0; h * w];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for u in 0..h {
                for v in 0..w {
                    let ang = 2.0 * PI * ((u * y) as f64 / h as f64 + (v * x) as f64 / w as f64);
                    acc += re[u * w + v] * ang.cos() - im[u * w + v] * ang.sin();
                }
            }
            out[y * w + x] = acc / (h * w) as f64;
        }
    }
    out
}

fn dct_scale(k: usize, n: usize) -> f64 {
    if k == 0 {
        (1.0 / n as f64).sqrt()
    } else {
        (2.0 / n as f64).sqrt()
    }
}

fn dct_basis(k: usize, m: usize, n: usize) -> f64 {
    dct_scale(k, n) * (PI * (2 * m + 1) as f64 * k as f64 / (2 * n) as f64).cos()
}

/// Direct cosine-sum orthonormal DCT-II high-pass: zero `i + j < delta`,
/// invert with the direct DCT-III sum.
pub fn dct_highpass_oracle(plane: &[f64], h: usize, w: usize, delta: f64) -> Vec<f64> {
    let mut coef = vec![0.0; h * w];
    for i in 0..h {
        for j in 0..w {
            if ((i + j) as f64) < delta {
                continue;
            }
            let mut acc = 0.0;
            for y in 0..h {
                for x in 0..w {
                    acc += plane[y * w + x] * dct_basis(i, y, h) * dct_basis(j, x, w);
                }
            }
            coef[i * w + j] = acc;
        }
    }
    let mut out = vec![0.0; h * w];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for i in 0..h {
                for j in 0..w {
                    acc += coef[i * w + j] * dct_basis(i, y, h) * dct_basis(j, x, w);
                }
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// Step-wise area under the precision-recall curve, one threshold per
/// distinct score: `Σ (R_k - R_{k-1}) · P_k`.
pub fn ap_oracle(scores: &[f64], labels: &[u8]) -> f64 {
    let positives = labels.iter().filter(|&&y| y == 1).count() as f64;
    let mut thresholds = scores.to_vec();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let mut prev_recall = 0.0;
    let mut area = 0.0;
    for t in thresholds {
        let (mut tp, mut fp) = (0.0, 0.0);
        for (&s, &y) in scores.iter().zip(labels) {
            if s >= t {
                if y == 1 {
                    tp += 1.0;
                } else {
                    fp += 1.0;
                }
            }
        }
        let recall = tp / positives;
        area += (recall - prev_recall) * tp / (tp + fp);
        prev_recall = recall;
    }
    area
}

/// `[mean|v|, std, excess kurtosis]` straight from the definitions.
pub fn moments_oracle(p: &[f64]) -> [f64; 3] {
    let n = p.len() as f64;
    let mean = p.iter().sum::<f64>() / n;
    let var = p.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m4 = p.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let kurt = if var == 0.0 { 0.0 } else { m4 / (var * var) - 3.0 };
    [p.iter().map(|v| v.abs()).sum::<f64>() / n, var.sqrt(), kurt]
}

/// Feature vector rebuilt slot by slot from the layout definition.
pub fn featurize_oracle(map: &ImageTensor, corr: &CorrelationMap) -> [f64; FEATURE_DIM] {
    let (c, h, w) = map.shape();
    let mut f = [0.0; FEATURE_DIM];
    for slot in 0..3 {
        let m = moments_oracle(map.plane(if c == 1 { 0 } else { slot }));
        f[3 * slot..3 * slot + 3].copy_from_slice(&m);
    }
    let edges = |len: usize, g: usize| {
        let step = len / 4;
        (g * step, if g == 3 { len } else { (g + 1) * step })
    };
    for gy in 0..4 {
        for gx in 0..4 {
            let (y0, y1) = edges(h, gy);
            let (x0, x1) = edges(w, gx);
            let mut acc = 0.0;
            let mut count = 0.0;
            for y in y0..y1 {
                for x in x0..x1 {
                    acc += (0..c).map(|ch| map.get(ch, y, x).abs()).sum::<f64>() / c as f64;
                    count += 1.0;
                }
            }
            f[9 + gy * 4 + gx] = if count > 0.0 { acc / count } else { 0.0 };
        }
    }
    let n = corr.data().len() as f64;
    for (k, target) in [-1.0, 0.0, 1.0].into_iter().enumerate() {
        f[25 + k] = corr.data().iter().filter(|&&v| v == target).count() as f64 / n;
    }
    f
}

fn loss_at(model: &LogisticModel, feats: &[FeatureVector], labels: &[u8]) -> f64 {
    bce_loss_and_grad(model, feats, labels).loss
}

/// Central-difference gradient of the mean BCE loss.
pub fn numeric_gradient(
    model: &LogisticModel,
    feats: &[FeatureVector],
    labels: &[u8],
    h: f64,
) -> (Vec<f64>, f64) {
    let mut gw = vec![0.0; FEATURE_DIM];
    for (i, g) in gw.iter_mut().enumerate() {
        let mut plus = model.clone();
        plus.weights[i] += h;
        let mut minus = model.clone();
        minus.weights[i] -= h;
        *g = (loss_at(&plus, feats, labels) - loss_at(&minus, feats, labels)) / (2.0 * h);
    }
    let mut plus = model.clone();
    plus.bias += h;
    let mut minus = model.clone();
    minus.bias -= h;
    let gb = (loss_at(&plus, feats, labels) - loss_at(&minus, feats, labels)) / (2.0 * h);
    (gw, gb)
}

// ----------------------------------------------------------------- checks

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Correlation map vs the per-window oracle on 200 random images up to 8×8.
pub fn check_corr_map(seed: u64) -> Check {
    let mut rng = RandStream::new(seed);
    let mut worst = 0.0f64;
    let mut off_lattice = 0;
    for case in 0..200 {
        let w = 2 + case % 3;
        let h = w + rng.up_to(8 - w);
        let wd = w + rng.up_to(8 - w);
        // Every fourth image uses few gray levels so flat windows occur.
        let levels = if case % 4 == 0 { 3 } else { 0 };
        let img = GrayImage::from_fn(h, wd, |_, _| {
            if levels > 0 {
                rng.up_to(levels) as f64 / levels as f64
            } else {
                rng.next_f64()
            }
        });
        let got = local_correlation_map(&img, w).expect("valid window");
        worst = worst.max(max_diff(got.data(), &corr_map_oracle(&img, w)));
        if w == 2 {
            off_lattice += got.data().iter().filter(|v| ![-1.0, 0.0, 1.0].contains(*v)).count();
        }
    }
    Check::new(
        "corr_map_oracle",
        worst <= 1e-9 && off_lattice == 0,
        format!("max |diff| = {worst:.2e}, w=2 values off {{-1,0,1}}: {off_lattice}"),
    )
}

#[derive(Deserialize)]
struct DwtCase {
    height: usize,
    width: usize,
    input: Vec<f64>,
    band_height: usize,
    band_width: usize,
    ll: Vec<f64>,
    lh: Vec<f64>,
    hl: Vec<f64>,
    hh: Vec<f64>,
}

#[derive(Deserialize)]
struct DwtFixture {
    cases: Vec<DwtCase>,
}

const DWT_FIXTURE: &str = include_str!("../tests/fixtures/dwt_bior13.json");

/// All four untrimmed sub-bands vs reference-toolbox output, plus the
/// constant-image check on the trimmed bands.
pub fn check_dwt_fixtures() -> Check {
    let fixture: DwtFixture = serde_json::from_str(DWT_FIXTURE).expect("fixture parses");
    let fb = FilterBank::bior13();
    let mut worst = 0.0f64;
    let mut shape_ok = true;
    for case in &fixture.cases {
        let x = ImageTensor::new(1, case.height, case.width, case.input.clone()).expect("fixture");
        let b = dwt2_raw(&x, &fb);
        shape_ok &= b.ll.shape() == (1, case.band_height, case.band_width);
        for (got, want) in [(&b.ll, &case.ll), (&b.lh, &case.lh), (&b.hl, &case.hl), (&b.hh, &case.hh)] {
            worst = worst.max(max_diff(got.data(), want));
        }
    }
    let v = 0.37;
    let b = dwt2_single(&ImageTensor::filled(1, 16, 16, v), &fb).expect("even size");
    let ll_err = b.ll.data().iter().map(|x| (x - 2.0 * v).abs()).fold(0.0, f64::max);
    let detail_max = [&b.lh, &b.hl, &b.hh]
        .iter()
        .flat_map(|t| t.data().iter().map(|x| x.abs()))
        .fold(0.0, f64::max);
    Check::new(
        "dwt_fixtures",
        shape_ok && worst <= 1e-6 && ll_err <= 1e-9 && detail_max <= 1e-5,
        format!(
            "{} cases, max |diff| = {worst:.2e}; constant: |LL-2v| = {ll_err:.1e}, max detail = {detail_max:.1e}",
            fixture.cases.len()
        ),
    )
}

/// FFT / DCT high-pass vs the direct transforms, idempotence and δ = 0.
pub fn check_spectral(seed: u64) -> Check {
    let mut rng = RandStream::new(seed);
    let (mut fft_err, mut dct_err, mut idem, mut ident) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..40 {
        let h = 1 + rng.up_to(7);
        let w = 1 + rng.up_to(7);
        let x = random_image(1 + 2 * rng.up_to(1), h, w, &mut rng);
        let hp = fft_highpass(&x);
        let delta = if rng.bernoulli(0.5) {
            default_dct_delta(h, w)
        } else {
            rng.uniform(0.0, (h + w) as f64)
        };
        let dh = dct_highpass(&x, delta).expect("delta >= 0");
        for c in 0..x.channels() {
            fft_err = fft_err.max(max_diff(hp.plane(c), &fft_highpass_oracle(x.plane(c), h, w)));
            dct_err = dct_err.max(max_diff(dh.plane(c), &dct_highpass_oracle(x.plane(c), h, w, delta)));
        }
        idem = idem.max(fft_highpass(&hp).max_abs_diff(&hp));
        ident = ident.max(dct_highpass(&x, 0.0).expect("delta 0").max_abs_diff(&x));
    }
    Check::new(
        "spectral_oracles",
        fft_err <= 1e-6 && dct_err <= 1e-6 && idem <= 1e-5 && ident <= 1e-5,
        format!(
            "fft {fft_err:.1e}, dct {dct_err:.1e}, fft idempotence {idem:.1e}, dct delta=0 {ident:.1e}"
        ),
    )
}

fn random_model(rng: &mut RandStream) -> LogisticModel {
    let mut m = LogisticModel::default();
    for i in 0..FEATURE_DIM {
        m.weights[i] = rng.uniform(-0.5, 0.5);
        m.feat_mean[i] = rng.uniform(-1.0, 1.0);
        m.feat_std[i] = rng.uniform(0.5, 2.0);
    }
    m.bias = rng.uniform(-1.0, 1.0);
    m
}

fn random_batch(rng: &mut RandStream) -> (Vec<FeatureVector>, Vec<u8>) {
    let n = 1 + rng.up_to(15);
    let feats = (0..n)
        .map(|_| {
            let mut f = [0.0; FEATURE_DIM];
            f.iter_mut().for_each(|v| *v = rng.gaussian(1.5));
            FeatureVector(f)
        })
        .collect();
    let labels = (0..n).map(|_| rng.up_to(1) as u8).collect();
    (feats, labels)
}

fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < 1e-7 {
        (a - b).abs()
    } else {
        (a - b).abs() / scale
    }
}

/// Analytic BCE gradient vs central differences over 100 random draws.
pub fn check_gradients(seed: u64) -> Check {
    let mut rng = RandStream::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let model = random_model(&mut rng);
        let (feats, labels) = random_batch(&mut rng);
        let LossGrad { grad_w, grad_b, .. } = bce_loss_and_grad(&model, &feats, &labels);
        let (nw, nb) = numeric_gradient(&model, &feats, &labels, 1e-6);
        for (a, n) in grad_w.iter().zip(&nw) {
            worst = worst.max(rel_err(*a, *n));
        }
        worst = worst.max(rel_err(grad_b, nb));
    }
    Check::new(
        "bce_gradient",
        worst <= 1e-4,
        format!("max relative error {worst:.2e}"),
    )
}

/// First AdamW step from zero state and pure decoupled decay, to 1e-12.
pub fn check_optimizer() -> Check {
    let lr = 5e-3;
    let no_decay = TrainConfig {
        weight_decay: 0.0,
        ..TrainConfig::default()
    };
    let mut worst = 0.0f64;
    for g in [-4.0, -0.25, 1e-3, 0.5, 7.0] {
        let mut m = LogisticModel::default();
        let mut st = AdamState::new(FEATURE_DIM);
        let grads = LossGrad {
            loss: 0.0,
            grad_w: vec![g; FEATURE_DIM],
            grad_b: g,
        };
        adamw_step(&mut m, &grads, &mut st, lr, &no_decay);
        // m̂ = g, v̂ = g², so the step is -lr · g / (|g| + ε).
        let want = -lr * g / (g.abs() + no_decay.eps);
        worst = worst.max((m.bias - want).abs());
        worst = worst.max(m.weights.iter().map(|w| (w - want).abs()).fold(0.0, f64::max));
    }
    let cfg = TrainConfig::default();
    let mut m = LogisticModel::default();
    m.weights.iter_mut().enumerate().for_each(|(i, w)| *w = i as f64 * 0.1 - 1.0);
    m.bias = 0.75;
    let before = m.clone();
    let zero = LossGrad {
        loss: 0.0,
        grad_w: vec![0.0; FEATURE_DIM],
        grad_b: 0.0,
    };
    adamw_step(&mut m, &zero, &mut AdamState::new(FEATURE_DIM), lr, &cfg);
    let k = 1.0 - lr * cfg.weight_decay;
    for (a, b) in m.weights.iter().zip(&before.weights) {
        worst = worst.max((a - k * b).abs());
    }
    worst = worst.max((m.bias - k * before.bias).abs());
    Check::new(
        "adamw_closed_form",
        worst <= 1e-12,
        format!("max deviation {worst:.1e}"),
    )
}

/// AP vs the PR-curve oracle on random instances and the hand-counted ACC
/// cases.
pub fn check_metrics(seed: u64) -> Check {
    let mut rng = RandStream::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let n = 1 + rng.up_to(19);
        let scores: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        let mut labels: Vec<u8> = (0..n).map(|_| rng.up_to(1) as u8).collect();
        let forced = rng.up_to(n - 1);
        labels[forced] = 1;
        let ap = average_precision(&scores, &labels).expect("has a positive");
        worst = worst.max((ap - ap_oracle(&scores, &labels)).abs());
    }
    let labels = [1, 1, 0, 0];
    let acc_ok = accuracy(&[0.9, 0.8, 0.1, 0.2], &labels, 0.5).ok() == Some(1.0)
        && accuracy(&[0.1, 0.2, 0.9, 0.8], &labels, 0.5).ok() == Some(0.0)
        && accuracy(&[0.9, 0.4, 0.6, 0.1], &labels, 0.5).ok() == Some(0.5)
        && accuracy(&[], &[], 0.5).is_err();
    let ap_ok = average_precision(&[0.9, 0.1], &[0, 1]).ok() == Some(0.5)
        && average_precision(&[0.4, 0.3], &[0, 0]).is_err();
    Check::new(
        "metrics_oracle",
        worst <= 1e-12 && acc_ok && ap_ok,
        format!("max AP diff {worst:.1e}, ACC hand cases {acc_ok}, AP hand cases {ap_ok}"),
    )
}

/// Feature slots vs direct moment computation on random 3×8×8 maps.
pub fn check_featurize(seed: u64) -> Check {
    let mut rng = RandStream::new(seed);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let c = if case % 5 == 0 { 1 } else { 3 };
        let h = 4 + rng.up_to(6);
        let w = 4 + rng.up_to(6);
        let map = ImageTensor::from_fn(c, h, w, |_, _, _| rng.gaussian(1.0));
        let gray = GrayImage::from_fn(h, w, |_, _| rng.up_to(4) as f64 / 4.0);
        let corr = local_correlation_map(&gray, 2).expect("window fits");
        let got = featurize(&map, &corr).expect("1 or 3 channels");
        worst = worst.max(max_diff(&got.0, &featurize_oracle(&map, &corr)));
        let hist = corr_summary(&corr).hist();
        worst = worst.max((hist.iter().sum::<f64>() - 1.0).abs());
    }
    Check::new(
        "featurize_oracle",
        worst <= 1e-9,
        format!("max |diff| = {worst:.1e}"),
    )
}

/// Every oracle check, in a fixed order.
pub fn run_all(seed: u64) -> Vec<Check> {
    vec![
        check_corr_map(seed),
        check_dwt_fixtures(),
        check_spectral(seed),
        check_gradients(seed),
        check_optimizer(),
        check_metrics(seed),
        check_featurize(seed),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for c in run_all(42) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn oracles_agree_on_hand_cases() {
        assert_eq!(ap_oracle(&[0.9, 0.1], &[0, 1]), 0.5);
        assert_eq!(pearson_oracle(&[0.0, 1.0], &[0.0, 2.0]), 1.0);
        assert_eq!(moments_oracle(&[2.0; 5]), [2.0, 0.0, 0.0]);
    }
}
