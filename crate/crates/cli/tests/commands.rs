use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command as Process;

use syncpred_cli::{error_kind, run, Cli, Command};
use syncpred_core::{Dataset, DatasetSpec, Model};

fn invoke(command: Command, out: &Path, set: &[String]) -> anyhow::Result<Vec<String>> {
    run(&Cli {
        command,
        config: None,
        seed: Some(3),
        out: out.to_path_buf(),
        set: set.to_vec(),
    })
}

fn data_arg(dir: &Path) -> String {
    format!("dataset={}", serde_json::to_string(dir).unwrap())
}

/// Small FCA dataset on 30-node graphs.
fn small_dataset(root: &Path) -> PathBuf {
    let dir = root.join("data");
    invoke(Command::Gen, &dir, &["dataset.samples_per_class=15".into()]).unwrap();
    dir
}

/// Data rows of a CSV written by a command, header included.
fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn gen_toy_fca_from_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("gen.json");
    let spec = DatasetSpec::toy(Model::Fca { kappa: 5 }, 10, 1);
    fs::write(&cfg, serde_json::json!({ "dataset": spec }).to_string()).unwrap();
    let out = tmp.path().join("toy");
    let lines = run(&Cli {
        command: Command::Gen,
        config: Some(cfg),
        seed: Some(9),
        out: out.clone(),
        set: vec![],
    })
    .unwrap();
    assert!(lines.iter().any(|l| l.contains("10 synchronizing, 10 non-synchronizing")));
    let ds = Dataset::load(&out).unwrap();
    assert_eq!(ds.spec.seed, 9);
    for s in &ds.samples {
        // trees carry n - 1 edges, rings n
        assert_eq!(s.graph.num_edges() + usize::from(s.label), s.num_nodes());
    }
    let rows = fs::read_to_string(out.join("dynamics.csv")).unwrap();
    assert!(rows.starts_with("# syncpred gen\n# seed: 9\n"));
}

#[test]
fn gen_prints_formula_edges() {
    let tmp = tempfile::tempdir().unwrap();
    let lines = invoke(Command::Gen, &tmp.path().join("d"), &["dataset.samples_per_class=5".into()]).unwrap();
    assert!(lines.iter().any(|l| l.starts_with("edges expected from the closed form: 39.75")), "{lines:?}");
}

#[test]
fn train_eval_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let data = small_dataset(tmp.path());
    let out = tmp.path().join("te");
    invoke(
        Command::TrainEval,
        &out,
        &[
            data_arg(&data),
            "r_values=[0,3,6]".into(),
            "inputs=[\"dynamics\",\"features\"]".into(),
            "classifiers=[{\"kind\":\"forest\",\"trees\":5},{\"kind\":\"net\",\"epochs\":2}]".into(),
        ],
    )
    .unwrap();
    let rows = rows(&out.join("metrics.csv"));
    assert_eq!(rows[0], ["dataset", "classifier", "r", "with_features", "accuracy", "precision", "recall"]);
    let body = &rows[1..];
    // per r: baseline + 2 classifiers; then 2 features-only rows
    assert_eq!(body.len(), 3 * 3 + 2);
    for r in ["0", "3", "6"] {
        assert_eq!(body.iter().filter(|row| row[1] == "baseline" && row[2] == r).count(), 1);
    }
    for row in body {
        let acc: f64 = row[4].parse().unwrap();
        assert!((0.0..=1.0).contains(&acc));
    }
    assert_eq!(body.iter().filter(|row| row[3] == "only").count(), 2);
}

#[test]
fn missing_dataset_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let err = invoke(Command::TrainEval, &tmp.path().join("o"), &[data_arg(&tmp.path().join("absent"))]).unwrap_err();
    assert_eq!(error_kind(&err), "io");
}

#[test]
fn ensemble_rows_and_oversized_subgraphs() {
    let tmp = tempfile::tempdir().unwrap();
    let data = small_dataset(tmp.path());
    let out = tmp.path().join("en");
    let common = [data_arg(&data), "classifier={\"kind\":\"forest\",\"trees\":5}".into(), "r_values=[2,5]".into()];
    let mut set = common.to_vec();
    set.extend(["n0=10".into(), "k_values=[1,2,4]".into()]);
    invoke(Command::Ensemble, &out, &set).unwrap();
    let rows = rows(&out.join("ensemble.csv"));
    assert_eq!(rows[0], ["k", "r", "with_features", "method", "accuracy", "precision", "recall"]);
    assert_eq!(rows.len() - 1, 2 * 3 * 2);
    let mut set = common.to_vec();
    set.push("n0=31".into());
    let err = invoke(Command::Ensemble, &tmp.path().join("bad"), &set).unwrap_err();
    assert_eq!(error_kind(&err), "invalid_parameter");
}

#[test]
fn importance_rows_sum_to_one() {
    let tmp = tempfile::tempdir().unwrap();
    let data = small_dataset(tmp.path());
    let out = tmp.path().join("im");
    invoke(
        Command::Importance,
        &out,
        &[data_arg(&data), "splits=3".into(), "r=2".into(), "classifier.stages=5".into()],
    )
    .unwrap();
    let body = rows(&out.join("importance.csv"));
    let p = 30 * 3 + 3 + 5;
    assert_eq!(body.len() - 1, 3 * p);
    for split in 0..3 {
        let total: f64 = body[1..]
            .iter()
            .filter(|r| r[0] == split.to_string())
            .map(|r| r[2].parse::<f64>().unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-9, "{total}");
    }
    let err = invoke(
        Command::Importance,
        &tmp.path().join("net"),
        &[data_arg(&data), "classifier={\"kind\":\"net\"}".into()],
    )
    .unwrap_err();
    assert_eq!(error_kind(&err), "unsupported_model");
}

#[test]
fn demo_writes_three_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("demo");
    invoke(Command::Demo, &out, &["iterations=5".into()]).unwrap();
    for file in ["km.csv", "fca.csv", "ghm.csv"] {
        let rows = rows(&out.join(file));
        assert_eq!(rows.len(), 1 + 6);
        assert!(rows.iter().all(|r| r.len() == 401));
    }
}

#[test]
fn unknown_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let err = invoke(Command::Demo, tmp.path(), &["colours=3".into()]).unwrap_err();
    assert_eq!(error_kind(&err), "config");
}

#[test]
fn binary_reports_errors_as_json() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Process::new(env!("CARGO_BIN_EXE_syncpred"))
        .args(["demo", "--set", "kappa=1", "--out"])
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    let line: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(line["error"]["kind"], "invalid_parameter");

    let ok = Process::new(env!("CARGO_BIN_EXE_syncpred"))
        .args(["demo", "--seed", "4", "--set", "iterations=2", "--out"])
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(ok.status.success());
    let km = fs::read_to_string(tmp.path().join("km.csv")).unwrap();
    assert!(km.starts_with("# syncpred demo\n# seed: 4\n"));
}
