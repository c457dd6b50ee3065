//! Black-box tests of the `loanboost` binary: exit codes, artifact
//! formats, and rerun byte-identity.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_loanboost"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap_or_else(|e| panic!("reading {}: {e}", p.display()))
}

/// synth + prep into `dir`, returning the prepared CSV path.
fn synth_and_prep(dir: &Path, seed: &str, n_perf: &str) -> std::path::PathBuf {
    let raw = dir.join("raw");
    run_ok(&[
        "synth",
        "--seed",
        seed,
        "--out-dir",
        path(&raw),
        "--n-demographic",
        "300",
        "--n-performance",
        n_perf,
        "--n-previous",
        "900",
    ]);
    let prep = dir.join("prep.csv");
    run_ok(&[
        "prep",
        "--demographic",
        path(&raw.join("demographic.csv")),
        "--performance",
        path(&raw.join("performance.csv")),
        "--previous",
        path(&raw.join("previous.csv")),
        "--reference-date",
        "2017-08-01",
        "--out",
        path(&prep),
    ]);
    prep
}

#[test]
fn train_without_data_is_a_usage_error() {
    let out = run(&["train", "--out", "/tmp/nope.json"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--data"), "stderr: {stderr}");
    assert!(stderr.to_lowercase().contains("usage"), "stderr: {stderr}");
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = run(&["synth", "--seed", "1", "--out-dir", "/tmp/x", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    for sub in [
        "synth",
        "prep",
        "train",
        "predict",
        "evaluate",
        "cv",
        "gridsearch",
        "importance",
        "roc",
    ] {
        assert!(stdout.contains(sub), "help misses {sub}");
    }
}

#[test]
fn invalid_bad_rate_is_a_config_error() {
    let out = run(&["synth", "--seed", "1", "--out-dir", "/tmp/x", "--bad-rate", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_input_file_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "train",
        "--data",
        path(&dir.path().join("absent.csv")),
        "--out",
        path(&dir.path().join("model.json")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_prepared_csv_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,target\nabc,0\n").unwrap();
    let out = run(&[
        "train",
        "--data",
        path(&bad),
        "--out",
        path(&dir.path().join("model.json")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_workers_is_a_usage_error() {
    let out = run(&["--workers", "0", "synth", "--seed", "1", "--out-dir", "/tmp/x"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pipeline_artifacts_are_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let second = dir.path().join("b");
    for base in [&first, &second] {
        let prep = synth_and_prep(base, "9", "320");
        run_ok(&[
            "train",
            "--data",
            path(&prep),
            "--out",
            path(&base.join("model.json")),
            "--n-estimators",
            "25",
            "--learning-rate",
            "0.1",
        ]);
        run_ok(&[
            "evaluate",
            "--model",
            path(&base.join("model.json")),
            "--data",
            path(&prep),
            "--out",
            path(&base.join("metrics.json")),
        ]);
    }
    for artifact in [
        "raw/demographic.csv",
        "raw/performance.csv",
        "raw/previous.csv",
        "prep.csv",
        "prep.meta.json",
        "model.json",
        "metrics.json",
    ] {
        assert_eq!(
            read(&first.join(artifact)),
            read(&second.join(artifact)),
            "artifact {artifact} differs between identical runs"
        );
    }
}

#[test]
fn model_json_roundtrips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let prep = synth_and_prep(dir.path(), "13", "300");
    let model = dir.path().join("model.json");
    run_ok(&[
        "train",
        "--data",
        path(&prep),
        "--out",
        path(&model),
        "--n-estimators",
        "20",
        "--learning-rate",
        "0.2",
        "--mode",
        "friedman",
    ]);
    let loaded = loanboost::booster::BoosterModel::load(&model).unwrap();
    let again = dir.path().join("model2.json");
    loaded.save(&again).unwrap();
    assert_eq!(read(&model), read(&again));
}

#[test]
fn prep_reuses_encodings_from_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let prep = synth_and_prep(dir.path(), "21", "280");
    let sidecar = dir.path().join("prep.meta.json");
    let reprep = dir.path().join("reprep.csv");
    let raw = dir.path().join("raw");
    run_ok(&[
        "prep",
        "--demographic",
        path(&raw.join("demographic.csv")),
        "--performance",
        path(&raw.join("performance.csv")),
        "--previous",
        path(&raw.join("previous.csv")),
        "--reference-date",
        "2017-08-01",
        "--out",
        path(&reprep),
        "--encodings",
        path(&sidecar),
    ]);
    assert_eq!(read(&prep), read(&reprep));
}

#[test]
fn predict_writes_one_probability_per_row() {
    let dir = tempfile::tempdir().unwrap();
    let prep = synth_and_prep(dir.path(), "33", "250");
    let model = dir.path().join("model.json");
    run_ok(&[
        "train",
        "--data",
        path(&prep),
        "--out",
        path(&model),
        "--n-estimators",
        "15",
    ]);
    let probs = dir.path().join("probs.csv");
    run_ok(&["predict", "--model", path(&model), "--data", path(&prep), "--out", path(&probs)]);
    let text = String::from_utf8(read(&probs)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "probability");
    assert_eq!(lines.len(), 1 + 250);
    for line in &lines[1..] {
        let p: f64 = line.parse().unwrap();
        assert!(p > 0.0 && p < 1.0);
    }
}

#[test]
fn evaluate_metrics_json_has_the_documented_shape() {
    let dir = tempfile::tempdir().unwrap();
    let prep = synth_and_prep(dir.path(), "5", "300");
    let model = dir.path().join("model.json");
    run_ok(&[
        "train",
        "--data",
        path(&prep),
        "--out",
        path(&model),
        "--n-estimators",
        "30",
        "--learning-rate",
        "0.1",
    ]);
    let metrics = dir.path().join("metrics.json");
    run_ok(&[
        "evaluate",
        "--model",
        path(&model),
        "--data",
        path(&prep),
        "--out",
        path(&metrics),
        "--positive-label",
        "good",
    ]);
    let value: serde_json::Value =
        serde_json::from_str(&String::from_utf8(read(&metrics)).unwrap()).unwrap();
    for key in ["accuracy", "precision", "recall", "f1", "auc"] {
        assert!(value[key].is_f64() || value[key].is_u64(), "missing {key}");
    }
    for key in ["tp", "tn", "fp", "fn"] {
        assert!(value["confusion_matrix"][key].is_u64(), "missing cm.{key}");
    }
    assert_eq!(value["positive_label"], "good");
    let auc = value["auc"].as_f64().unwrap();
    assert!(auc > 0.5 && auc <= 1.0, "auc {auc}");
}

#[test]
fn cv_csv_has_one_row_per_fold() {
    let dir = tempfile::tempdir().unwrap();
    let prep = synth_and_prep(dir.path(), "17", "260");
    let csv = dir.path().join("cv.csv");
    let json = dir.path().join("cv.json");
    run_ok(&[
        "cv",
        "--data",
        path(&prep),
        "--k",
        "4",
        "--n-estimators",
        "10",
        "--learning-rate",
        "0.2",
        "--out-csv",
        path(&csv),
        "--out-json",
        path(&json),
    ]);
    let text = String::from_utf8(read(&csv)).unwrap();
    assert_eq!(text.lines().count(), 1 + 4);
    assert!(text.lines().next().unwrap().starts_with("combo,fold,"));
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8(read(&json)).unwrap()).unwrap();
    assert_eq!(report["k"], 4);
    assert_eq!(report["folds"].as_array().unwrap().len(), 4);
}

#[test]
fn gridsearch_reports_every_combination() {
    let dir = tempfile::tempdir().unwrap();
    let prep = synth_and_prep(dir.path(), "25", "240");
    let best = dir.path().join("best.json");
    let csv = dir.path().join("grid.csv");
    let json = dir.path().join("grid.json");
    run_ok(&[
        "gridsearch",
        "--data",
        path(&prep),
        "--k",
        "3",
        "--n-estimators",
        "8",
        "--learning-rate",
        "0.2",
        "--grid",
        "max-depth=2,4",
        "--grid",
        "reg-lambda=0.5,2",
        "--out-best",
        path(&best),
        "--out-csv",
        path(&csv),
        "--out-json",
        path(&json),
    ]);
    let text = String::from_utf8(read(&csv)).unwrap();
    // 4 combinations x 3 folds + header.
    assert_eq!(text.lines().count(), 1 + 12);
    let result: serde_json::Value =
        serde_json::from_str(&String::from_utf8(read(&json)).unwrap()).unwrap();
    assert_eq!(result["reports"].as_array().unwrap().len(), 4);
    let best_value: serde_json::Value =
        serde_json::from_str(&String::from_utf8(read(&best)).unwrap()).unwrap();
    assert!(best_value["max_depth"].is_u64());
}

#[test]
fn bad_grid_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let prep = synth_and_prep(dir.path(), "29", "220");
    let out = run(&[
        "gridsearch",
        "--data",
        path(&prep),
        "--grid",
        "tree-count=1,2",
        "--out-best",
        path(&dir.path().join("b.json")),
        "--out-csv",
        path(&dir.path().join("g.csv")),
        "--out-json",
        path(&dir.path().join("g.json")),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn importance_csv_is_ranked_and_normalized() {
    let dir = tempfile::tempdir().unwrap();
    let prep = synth_and_prep(dir.path(), "37", "300");
    let model = dir.path().join("model.json");
    run_ok(&[
        "train",
        "--data",
        path(&prep),
        "--out",
        path(&model),
        "--n-estimators",
        "30",
        "--learning-rate",
        "0.1",
    ]);
    for kind in ["gain", "split-count"] {
        let out_csv = dir.path().join(format!("imp_{kind}.csv"));
        run_ok(&["importance", "--model", path(&model), "--kind", kind, "--out", path(&out_csv)]);
        let text = String::from_utf8(read(&out_csv)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("feature,score,kind"));
        let scores: Vec<f64> = lines
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert!(!scores.is_empty());
        let total: f64 = scores.iter().sum();
        assert!((total - 1.0).abs() < 1e-9, "total {total}");
        assert!(scores.windows(2).all(|w| w[0] >= w[1]), "not ranked");
    }
}

#[test]
fn roc_on_perfectly_separable_data_draws_the_corner() {
    let dir = tempfile::tempdir().unwrap();
    // Hand-written separable prepared data; a single stump makes exactly
    // two distinct scores, so the curve is the three corner points.
    let prep = dir.path().join("prep.csv");
    let mut csv = String::from("x,target\n");
    for i in 0..12 {
        let x = f64::from(i) - 5.5;
        csv.push_str(&format!("{x},{}\n", u8::from(x > 0.0)));
    }
    std::fs::write(&prep, csv).unwrap();

    let model = dir.path().join("model.json");
    run_ok(&[
        "train",
        "--data",
        path(&prep),
        "--out",
        path(&model),
        "--n-estimators",
        "1",
        "--learning-rate",
        "1.0",
        "--max-depth",
        "1",
        "--subsample",
        "1.0",
        "--reg-alpha",
        "0",
        "--reg-lambda",
        "0",
    ]);
    let out_csv = dir.path().join("roc.csv");
    let out_svg = dir.path().join("roc.svg");
    run_ok(&[
        "roc",
        "--model",
        path(&model),
        "--data",
        path(&prep),
        "--out-csv",
        path(&out_csv),
        "--out-svg",
        path(&out_svg),
    ]);
    let svg = String::from_utf8(read(&out_svg)).unwrap();
    assert!(
        svg.contains("points=\"0,600 0,0 600,0\""),
        "svg polyline: {svg}"
    );
    assert!(svg.contains("stroke-dasharray"));
    let roc_text = String::from_utf8(read(&out_csv)).unwrap();
    assert_eq!(roc_text.lines().next(), Some("fpr,tpr"));
    assert_eq!(roc_text.lines().count(), 1 + 3);
}

#[test]
fn verbose_training_logs_one_line_per_round() {
    let dir = tempfile::tempdir().unwrap();
    let prep = synth_and_prep(dir.path(), "45", "200");
    let out = run(&[
        "train",
        "--data",
        path(&prep),
        "--out",
        path(&dir.path().join("model.json")),
        "--n-estimators",
        "7",
        "--verbose",
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(
        stdout.lines().filter(|l| l.contains("train-logloss")).count(),
        7
    );
}
