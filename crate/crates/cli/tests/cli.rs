use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pairspin"));
    c.env_remove("PAIRSPIN_CONFIG");
    c
}

fn repo(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn data_rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn pulse_scan_on_ideal_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let cfg = repo("configs/ideal.json");
    ok(&[
        "pulse-scan", "--config", cfg.to_str().unwrap(), "--tau-max-us", "40", "--points", "13",
        "--fidelity", "1", "--out", out.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# x: tau_us\n"));
    assert!(text.contains("# config: {"));
    assert!(text.contains(concat!("pairspin-cli ", env!("CARGO_PKG_VERSION"))));
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 13);
    // row 6 is τ = 20 µs, the π/2 point
    assert_eq!(rows[6][0], 20.0);
    assert!(rows[6][2].abs() < 1e-12);
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.csv");
    let model_s = model.to_str().unwrap();
    let scan = ["ramsey-scan", "--points", "61", "--fidelity", "0.8", "--out", model_s];
    ok(&scan);
    let first = std::fs::read(&model).unwrap();
    ok(&scan);
    assert_eq!(first, std::fs::read(&model).unwrap());

    let data = dir.path().join("data.csv");
    let data_s = data.to_str().unwrap();
    let sample = ["sample", "--model", model_s, "--shots", "5000", "--seed", "9", "--out", data_s];
    ok(&sample);
    let first = std::fs::read(&data).unwrap();
    ok(&sample);
    assert_eq!(first, std::fs::read(&data).unwrap());

    let other = dir.path().join("other.csv");
    ok(&["sample", "--model", model_s, "--shots", "5000", "--seed", "10", "--out", other.to_str().unwrap()]);
    assert_ne!(data_rows(&data), data_rows(&other));
}

#[test]
fn full_destruction_equals_unentangled_scan() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("destroyed.csv");
    let b = dir.path().join("mixed.csv");
    ok(&["pulse-scan", "--tau-max-us", "40", "--fidelity", "1", "--destroy", "1", "--out", a.to_str().unwrap()]);
    ok(&["pulse-scan", "--tau-max-us", "40", "--fidelity", "0", "--out", b.to_str().unwrap()]);
    let (ra, rb) = (data_rows(&a), data_rows(&b));
    assert_eq!(ra.len(), 25);
    for (x, y) in ra.iter().zip(&rb) {
        for (u, v) in x.iter().zip(y) {
            assert!((u - v).abs() < 1e-12, "{x:?} vs {y:?}");
        }
    }
}

#[test]
fn area_and_duration_grids_agree() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("tau.csv");
    let b = dir.path().join("area.csv");
    ok(&["pulse-scan", "--tau-max-us", "40", "--points", "9", "--out", a.to_str().unwrap()]);
    ok(&["pulse-scan", "--area-max", "3.14159265358979", "--points", "9", "--out", b.to_str().unwrap()]);
    for (x, y) in data_rows(&a).iter().zip(&data_rows(&b)) {
        for (u, v) in x.iter().zip(y) {
            assert!((u - v).abs() < 1e-9);
        }
    }
}

#[test]
fn shipped_dataset_bounds_the_fidelity_above_nine_tenths() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fit.json");
    ok(&[
        "fit-fidelity",
        "--data", repo("data/synthetic_f1.csv").to_str().unwrap(),
        "--config", repo("configs/default.json").to_str().unwrap(),
        "--grid", "0:0.01:1",
        "--out", out.to_str().unwrap(),
    ]);
    let v = json(&out);
    assert_eq!(v["result"]["best_f"], 1);
    assert!(v["result"]["lower"].as_f64().unwrap() > 0.9);
    assert_eq!(v["axis"], "tau_us");
    assert!(v["config"]["rates"].is_object());
}

#[test]
fn shipped_dataset_regenerates_from_its_recipe() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("synthetic_f1.csv");
    let cfg = repo("configs/default.json");
    let model = repo("data/model_f1.csv");
    ok(&[
        "sample", "--config", cfg.to_str().unwrap(), "--model", model.to_str().unwrap(),
        "--shots", "1000000", "--seed", "20240611", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(data_rows(&out), data_rows(&repo("data/synthetic_f1.csv")));
}

#[test]
fn fringe_fit_of_ramsey_scans() {
    let dir = tempfile::tempdir().unwrap();
    let mut spacing = Vec::new();
    for probe in ["pair", "single-atom"] {
        let model = dir.path().join(format!("{probe}.csv"));
        let fit = dir.path().join(format!("{probe}.json"));
        ok(&["ramsey-scan", "--probe", probe, "--out", model.to_str().unwrap()]);
        ok(&["fit-fringe", "--data", model.to_str().unwrap(), "--channel", "1", "--out", fit.to_str().unwrap()]);
        spacing.push(json(&fit)["result"]["spacing"].as_f64().unwrap());
    }
    assert!((spacing[0] - 100.0).abs() < 1e-6, "{spacing:?}");
    assert!((spacing[1] - 200.0).abs() < 1e-6, "{spacing:?}");
}

#[test]
fn negative_rate_fails_validation_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"rates": {"zero_to_chi1": -8, "chi1_to_zero": 4, "chi1_to_chi2": 4,
        "chi2_to_chi1": 3, "zero_to_chi2": 2, "chi2_to_zero": 2, "coherence_fraction": 1}}"#)
        .unwrap();
    let out = run(&["validate-config", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 1);
    let err: serde_json::Value = serde_json::from_str(&stderr).unwrap();
    assert_eq!(err["error"]["key"], "rates.zero_to_chi1");
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"hold_time": 0.1}"#).unwrap();
    let out = run(&["validate-config", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["key"], "hold_time");
}

#[test]
fn config_path_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"hold_time_s": 0.25}"#).unwrap();
    let out = bin().arg("validate-config").env("PAIRSPIN_CONFIG", &cfg).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["hold_time_s"], 0.25);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["pulse-scan", "--out", "x.csv"]).status.code(), Some(2));
    assert_eq!(
        run(&["pulse-scan", "--tau-max-us", "40", "--area-max", "3", "--out", "x.csv"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["sample", "--model", "m.csv", "--shots", "10"]).status.code(), Some(2));
    assert_eq!(run(&["sample", "--model", "m.csv", "--shots", "0", "--seed", "1"]).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fit.json");
    let missing = run(&["fit-fidelity", "--data", "/nonexistent.csv", "--out", out.to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(1));
    let bad_grid = run(&[
        "fit-fidelity", "--data", repo("data/synthetic_f1.csv").to_str().unwrap(),
        "--grid", "0.2:0.01:1", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(bad_grid.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&bad_grid.stderr).unwrap();
    assert_eq!(err["error"]["key"], "grid");
    assert!(!out.exists());
}
