use std::path::Path;
use std::process::{Command, Output};

use sidforge::classifier::{LogisticModel, TrainConfig};
use sidforge::img::{read_sidt, write_png, ImageTensor};
use sidforge::transforms::AugmentConfig;

fn sidforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sidforge"))
        .args(args)
        .env_remove("SIDFORGE_SEED")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = sidforge(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str]) -> String {
    let out = sidforge(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Generates a small dataset with `pairs` real/fake pairs.
fn toy(root: &Path, pairs: usize, seed: &str) {
    let n = pairs.to_string();
    ok(&["synth", "--natural", &n, "--size", "72", "--seed", seed, "--out", s(root)]);
}

const SMALL: [&str; 8] = ["--crop", "64", "--patch", "8", "--batch-size", "4", "--epochs", "2"];

#[test]
fn help_lists_flags_with_library_defaults() {
    let help = ok(&["train", "--help"]);
    let aug = AugmentConfig::default();
    let cfg = TrainConfig::default();
    for (flag, default) in [
        ("--crop", aug.crop_size.to_string()),
        ("--alpha", aug.alpha.to_string()),
        ("--beta", aug.beta.to_string()),
        ("--mask-prob", aug.mask_prob.to_string()),
        ("--patch", aug.patch_size.to_string()),
        ("--max-ratio", aug.max_mask_ratio.to_string()),
        ("--flip-prob", aug.flip_prob.to_string()),
        ("--epochs", cfg.epochs.to_string()),
        ("--batch-size", cfg.batch_size.to_string()),
        ("--lr", cfg.lr.to_string()),
        ("--weight-decay", cfg.weight_decay.to_string()),
        ("--warmup-epochs", cfg.warmup_epochs.to_string()),
        ("--seed", cfg.seed.to_string()),
    ] {
        let line = help
            .lines()
            .skip_while(|l| !l.trim_start().starts_with(flag))
            .take(2)
            .collect::<String>();
        assert!(line.contains(&format!("[default: {default}]")), "{flag}: {line:?}");
    }
    for flag in ["--workers", "--extractor", "--delta", "--laplace-variant", "--config"] {
        assert!(help.contains(flag), "{flag}");
    }
    let eval_help = ok(&["eval", "--help"]);
    for flag in ["--sigma", "--quality", "--eval-mask-ratio", "--eval-patch", "--skip-bad", "--out", "--format"] {
        assert!(eval_help.contains(flag), "{flag}");
    }
}

#[test]
fn synth_train_eval_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    toy(&data, 4, "3");
    let model = tmp.path().join("m.sidm");
    let mut args = vec!["train", s(&data), "--out", s(&model)];
    args.extend(SMALL);
    ok(&args);
    LogisticModel::load(&model).unwrap();
    let losses = std::fs::read_to_string(tmp.path().join("m.sidm.loss.csv")).unwrap();
    assert_eq!(losses.lines().count(), 3);
    assert!(losses.starts_with("epoch,loss\n"));

    let eval = ["eval", s(&data), "--model", s(&model), "--crop", "64", "--eval-mask-ratio", "0.3", "--eval-patch", "8"];
    let a = ok(&eval);
    let b = ok(&eval);
    assert_eq!(a, b);
    assert!(a.starts_with("source_id,n,acc,ap\ntoy,8,"));
    assert!(a.lines().last().unwrap().starts_with("MACRO,8,"));

    let json = ok(&["eval", s(&data), "--model", s(&model), "--crop", "64", "--format", "json"]);
    assert!(json.contains("\"acc_m\""));

    let env = Command::new(env!("CARGO_BIN_EXE_sidforge"))
        .args(eval)
        .env("SIDFORGE_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(env.stdout).unwrap(), a);
}

#[test]
fn zero_epochs_writes_a_model_and_an_empty_history() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    toy(&data, 2, "4");
    let model = tmp.path().join("zero.sidm");
    ok(&["train", s(&data), "--epochs", "0", "--crop", "64", "--out", s(&model)]);
    assert_eq!(LogisticModel::load(&model).unwrap(), LogisticModel::default());
    let losses = std::fs::read_to_string(tmp.path().join("zero.sidm.loss.csv")).unwrap();
    assert_eq!(losses, "epoch,loss\n");
}

#[test]
fn sweep_emits_one_row_per_value() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    toy(&data, 4, "5");
    let mut args = vec![
        "sweep", "--train-set", s(&data), "--test-set", s(&data),
        "--param", "alpha", "--values", "0,0.2,0.4,0.6,0.8",
    ];
    args.extend(SMALL);
    let csv = ok(&args);
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "param,value,source,acc,ap");
    assert_eq!(rows.len(), 6);
    for (row, v) in rows[1..].iter().zip(["0", "0.2", "0.4", "0.6", "0.8"]) {
        assert!(row.starts_with(&format!("alpha,{v},toy,")), "{row}");
    }

    let mut args = vec![
        "sweep", "--train-set", s(&data), "--test-set", s(&data),
        "--param", "quality", "--values", "70,90",
    ];
    args.extend(SMALL);
    assert_eq!(ok(&args).lines().count(), 3);
    args[7] = "70.5";
    fails(&args);
}

#[test]
fn extract_and_corrmap() {
    let tmp = tempfile::tempdir().unwrap();
    let img = tmp.path().join("x.png");
    write_png(&ImageTensor::from_fn(3, 20, 16, |c, y, x| ((c + y * 3 + x * 5) % 17) as f64 / 16.0), &img).unwrap();
    let dump = tmp.path().join("x.sidt");
    ok(&["extract", s(&img), "--out", s(&dump)]);
    assert_eq!(read_sidt(&dump).unwrap().shape(), (3, 10, 8));
    ok(&["extract", s(&img), "--extractor", "laplace", "--laplace-variant", "8", "--crop", "12", "--out", s(&dump)]);
    assert_eq!(read_sidt(&dump).unwrap().shape(), (3, 12, 12));

    let maps = tmp.path().join("maps");
    let csv = ok(&["corrmap", s(tmp.path()), "--maps", s(&maps)]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "path,mean_rho,frac_neg,frac_zero,frac_pos");
    assert_eq!(lines.len(), 2);
    let fracs: f64 = lines[1].split(',').skip(2).map(|v| v.parse::<f64>().unwrap()).sum();
    assert!((fracs - 1.0).abs() < 1e-5);
    assert_eq!(read_sidt(maps.join("x.sidt")).unwrap().shape(), (1, 19, 15));
}

#[test]
fn failures_exit_nonzero_and_leave_no_output() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    toy(&data, 2, "6");
    let out = tmp.path().join("m.sidm");

    fails(&["train", s(&data), "--bogus-flag", "--out", s(&out)]);
    let err = fails(&["train", s(&data), "--alpha", "1.5", "--out", s(&out)]);
    assert!(err.contains("alpha"), "{err}");
    fails(&["train", s(&tmp.path().join("missing")), "--out", s(&out)]);
    fails(&["eval", s(&data), "--model", s(&out)]);
    fails(&["eval", s(&data), "--model", s(&out), "--sigma", "1", "--quality", "80"]);
    assert!(!out.exists());

    // A broken image aborts evaluation unless skipped.
    ok(&["train", s(&data), "--epochs", "0", "--crop", "64", "--out", s(&out)]);
    std::fs::write(data.join("toy/0_real/zz.png"), b"garbage").unwrap();
    let report = tmp.path().join("report.csv");
    let err = fails(&["eval", s(&data), "--model", s(&out), "--crop", "64", "--out", s(&report)]);
    assert!(err.contains("zz.png"), "{err}");
    assert!(!report.exists());
    ok(&["eval", s(&data), "--model", s(&out), "--crop", "64", "--skip-bad", "--out", s(&report)]);
    assert!(report.exists());

    // Odd-sized inputs cannot be synthesized; the half-written folder goes away.
    let odd = tmp.path().join("odd");
    std::fs::create_dir(&odd).unwrap();
    write_png(&ImageTensor::zeros(3, 8, 8), odd.join("a.png")).unwrap();
    write_png(&ImageTensor::zeros(3, 9, 8), odd.join("b.png")).unwrap();
    let fakes = tmp.path().join("fakes");
    fails(&["synth", s(&odd), "--out", s(&fakes)]);
    assert!(!fakes.exists());

    let leftovers: Vec<_> = std::fs::read_dir(tmp.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().ends_with(".partial"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn selftest_passes() {
    let out = ok(&["selftest"]);
    assert!(out.lines().all(|l| l.starts_with("PASS")), "{out}");
}
