use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Result};
use rayon::prelude::*;

use sidforge::classifier::{eval_view, train, LogisticModel};
use sidforge::corr::{corr_summary, local_correlation_map};
use sidforge::harness::{
    evaluate, image_files, load_dataset, natural_corpus, synthesize_fake, Dataset, EvalOptions,
    EvalReport, NaturalConfig, PerturbSpec, FAKE_DIR, REAL_DIR,
};
use sidforge::img::{encode_sidt, read_image, to_gray, write_png};
use sidforge::selftest;

use crate::args::{
    CorrmapCmd, EvalCmd, ExtractCmd, Format, SweepCmd, SweepParam, SynthCmd, TrainCmd,
};
use crate::output::{emit, write_all_or_nothing, OutputDir};

fn dataset(root: &Path) -> Result<Dataset> {
    let ds = load_dataset(root)?;
    if ds.ignored > 0 {
        log::warn!("{}: ignored {} entries", root.display(), ds.ignored);
    }
    Ok(ds)
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into())
}

pub fn extract(cmd: &ExtractCmd) -> Result<()> {
    let extractor = cmd.extractor.resolve()?;
    let mut x = read_image(&cmd.image)?;
    if let Some(size) = cmd.crop {
        if size == 0 {
            bail!("--crop must be at least 1");
        }
        x = eval_view(&x, size);
    }
    let map = extractor.apply(&x)?;
    write_all_or_nothing(&[(&cmd.out, &encode_sidt(&map))])
}

pub fn corrmap(cmd: &CorrmapCmd) -> Result<()> {
    if cmd.window < 2 {
        bail!("--window must be at least 2");
    }
    let inputs = if cmd.input.is_dir() {
        image_files(&cmd.input)?
    } else {
        vec![cmd.input.clone()]
    };
    if inputs.is_empty() {
        bail!("{}: no images found", cmd.input.display());
    }
    let maps = inputs
        .par_iter()
        .map(|p| {
            let x = read_image(p)?;
            Ok(local_correlation_map(&to_gray(&x)?, cmd.window)?)
        })
        .collect::<Vec<Result<_>>>();

    let mut dump = cmd.maps.as_deref().map(OutputDir::new).transpose()?;
    let mut csv = String::from("path,mean_rho,frac_neg,frac_zero,frac_pos\n");
    for (path, map) in inputs.iter().zip(maps) {
        let map = map.map_err(|e| anyhow!("{}: {e}", path.display()))?;
        let s = corr_summary(&map);
        let _ = writeln!(
            csv,
            "{},{:.6},{:.6},{:.6},{:.6}",
            path.display(),
            s.mean,
            s.frac_neg,
            s.frac_zero,
            s.frac_pos
        );
        if let Some(dir) = dump.as_mut() {
            let target = dir.track(dir.path().join(format!("{}.sidt", file_stem(path))))?;
            write_all_or_nothing(&[(&target, &encode_sidt(&map.to_tensor()))])?;
        }
    }
    emit(cmd.out.as_deref(), &csv)?;
    if let Some(dir) = dump {
        dir.commit();
    }
    Ok(())
}

pub fn synth(cmd: &SynthCmd, seed: u64) -> Result<()> {
    let mut out = OutputDir::new(&cmd.out)?;
    match (&cmd.input, cmd.natural) {
        (Some(input), _) => {
            let files = image_files(input)?;
            if files.is_empty() {
                bail!("{}: no images found", input.display());
            }
            for path in &files {
                let fake = read_image(path)
                    .and_then(|x| synthesize_fake(&x))
                    .map_err(|e| anyhow!("{}: {e}", path.display()))?;
                let target = out.track(cmd.out.join(format!("{}.png", file_stem(path))))?;
                write_png(&fake, &target)?;
            }
        }
        (None, Some(count)) => {
            let cfg = NaturalConfig {
                height: cmd.size,
                width: cmd.size,
                ..NaturalConfig::default()
            };
            let reals = natural_corpus(&cfg, count, seed)?;
            let root = cmd.out.join(&cmd.source);
            for (i, x) in reals.iter().enumerate() {
                let name = format!("{i:04}.png");
                let real = out.track(root.join(REAL_DIR).join(&name))?;
                write_png(x, &real)?;
                let fake = out.track(root.join(FAKE_DIR).join(&name))?;
                write_png(&synthesize_fake(x)?, &fake)?;
            }
        }
        (None, None) => bail!("give an input folder or --natural"),
    }
    out.commit();
    Ok(())
}

fn loss_csv(history: &[f64]) -> String {
    let mut csv = String::from("epoch,loss\n");
    for (i, l) in history.iter().enumerate() {
        let _ = writeln!(csv, "{},{l:.8}", i + 1);
    }
    csv
}

pub fn train_cmd(cmd: &TrainCmd, seed: u64) -> Result<()> {
    let aug = cmd.aug.resolve()?;
    let extractor = cmd.extractor.resolve()?;
    let cfg = cmd.train.resolve(seed)?;
    let ds = dataset(&cmd.dataset)?;
    let outcome = train(&ds, &cfg, &aug, &extractor)?;
    for (i, l) in outcome.history.iter().enumerate() {
        log::info!("epoch {}: loss {l:.6}", i + 1);
    }
    let loss_path = cmd.loss_csv.clone().unwrap_or_else(|| {
        let mut p = cmd.out.clone().into_os_string();
        p.push(".loss.csv");
        PathBuf::from(p)
    });
    write_all_or_nothing(&[
        (&cmd.out, &outcome.model.to_bytes()),
        (&loss_path, loss_csv(&outcome.history).as_bytes()),
    ])
}

fn render(report: &EvalReport, format: Format) -> String {
    match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    }
}

pub fn eval_cmd(cmd: &EvalCmd, seed: u64) -> Result<()> {
    let extractor = cmd.extractor.resolve()?;
    let perturb = cmd.perturb.resolve()?;
    if cmd.crop == 0 {
        bail!("--crop must be at least 1");
    }
    let model = LogisticModel::load(&cmd.model)?;
    let ds = dataset(&cmd.dataset)?;
    let opts = EvalOptions {
        crop: cmd.crop,
        seed,
        skip_bad: cmd.report.skip_bad,
    };
    let report = evaluate(&model, &ds, &extractor, perturb.as_ref(), &opts)?;
    if report.failed > 0 {
        log::warn!("{} samples skipped", report.failed);
    }
    emit(cmd.report.out.as_deref(), &render(&report, cmd.report.format))
}

fn whole(param: SweepParam, v: f64) -> Result<usize> {
    if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
        bail!("{} takes whole numbers, got {v}", param.name());
    }
    Ok(v as usize)
}

fn quality(v: f64) -> Result<u8> {
    let q = whole(SweepParam::Quality, v)?;
    u8::try_from(q).map_err(|_| anyhow!("quality {q} out of range"))
}

pub fn sweep(cmd: &SweepCmd, seed: u64) -> Result<()> {
    let base_aug = cmd.aug.resolve()?;
    let extractor = cmd.extractor.resolve()?;
    let cfg = cmd.train.resolve(seed)?;
    let base_perturb = cmd.perturb.resolve()?;
    let train_ds = dataset(&cmd.train_set)?;
    let test_ds = dataset(&cmd.test_set)?;
    let opts = EvalOptions {
        crop: base_aug.crop_size,
        seed,
        skip_bad: cmd.skip_bad,
    };

    // Validate the whole grid before spending time on training.
    let mut grid = Vec::with_capacity(cmd.values.len());
    for &v in &cmd.values {
        let mut aug = base_aug.clone();
        let mut perturb = base_perturb;
        match cmd.param {
            SweepParam::Alpha => aug.alpha = v,
            SweepParam::Beta => aug.beta = v,
            SweepParam::Patch => aug.patch_size = whole(cmd.param, v)?,
            SweepParam::MaxRatio => aug.max_mask_ratio = v,
            SweepParam::Sigma => perturb = Some(PerturbSpec::GaussianBlur { sigma: v }),
            SweepParam::Quality => perturb = Some(PerturbSpec::Jpeg { quality: quality(v)? }),
            SweepParam::EvalMaskRatio => {
                perturb = Some(PerturbSpec::RandomMaskEval {
                    ratio: v,
                    patch: cmd.perturb.eval_patch,
                })
            }
            SweepParam::EvalPatch => {
                let ratio = cmd
                    .perturb
                    .eval_mask_ratio
                    .ok_or_else(|| anyhow!("sweeping eval_patch needs --eval-mask-ratio"))?;
                perturb = Some(PerturbSpec::RandomMaskEval {
                    ratio,
                    patch: whole(cmd.param, v)?,
                })
            }
        }
        aug.validate()
            .map_err(|e| anyhow!("{} = {v}: {e}", cmd.param.name()))?;
        if let Some(p) = &perturb {
            p.validate()
                .map_err(|e| anyhow!("{} = {v}: {e}", cmd.param.name()))?;
        }
        grid.push((v, aug, perturb));
    }

    let shared = if cmd.param.retrains() {
        None
    } else {
        Some(train(&train_ds, &cfg, &base_aug, &extractor)?.model)
    };
    let mut csv = String::from("param,value,source,acc,ap\n");
    for (v, aug, perturb) in &grid {
        let model = match &shared {
            Some(m) => m.clone(),
            None => train(&train_ds, &cfg, aug, &extractor)?.model,
        };
        let report = evaluate(&model, &test_ds, &extractor, perturb.as_ref(), &opts)?;
        log::info!("{} = {v}: ACC_M {:.4} AP_M {:.4}", cmd.param.name(), report.acc_m, report.ap_m);
        for s in &report.sources {
            let _ = writeln!(csv, "{},{v},{},{:.6},{:.6}", cmd.param.name(), s.source_id, s.acc, s.ap);
        }
        if report.sources.len() > 1 {
            let _ = writeln!(csv, "{},{v},MACRO,{:.6},{:.6}", cmd.param.name(), report.acc_m, report.ap_m);
        }
    }
    emit(cmd.out.as_deref(), &csv)
}

pub fn selftest_cmd(seed: u64) -> Result<()> {
    let checks = selftest::run_all(seed);
    let mut failed = 0;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    if failed > 0 {
        bail!("{failed} of {} checks failed", checks.len());
    }
    Ok(())
}
