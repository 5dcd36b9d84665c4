//! End-to-end runs of the `mingauge` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mingauge"))
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path
}

const SMALL_CATENOID: &str = r#"{
  "surface": {"name": "catenoid", "params": {"R_max": 50, "nu": 81, "nv": 48}},
  "base_points": [[0, 0, 0], [0.3, 0.2, 0.1]],
  "R_grid": {"count": 16},
  "mc": {"samples": 2000, "seed": 7}
}"#;

fn report(config: &Path, out: &Path, threads: Option<&str>) -> Output {
    let mut cmd = bin();
    cmd.args(["report", "--config"]).arg(config).arg("--out").arg(out);
    if let Some(t) = threads {
        cmd.env("MINGAUGE_THREADS", t);
    }
    cmd.output().unwrap()
}

#[test]
fn catalog_lists_every_surface() {
    let out = bin().arg("catalog").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["plane", "catenoid", "helicoid", "enneper", "sphere", "complex_parabola_r4"] {
        assert!(text.contains(name), "{name} missing");
    }
    let json = bin().args(["catalog", "--json"]).output().unwrap();
    let v: Value = serde_json::from_slice(&json.stdout).unwrap();
    assert!(v.as_array().is_some_and(|a| a.len() == 6));
}

#[test]
fn unknown_surface_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), r#"{"surface": {"name": "torus"}, "mc": {"seed": 1}}"#);
    let out = report(&cfg, &dir.path().join("out"), None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("torus"));
}

#[test]
fn malformed_config_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), r#"{"surface": {"name": "plane"}, "mc": {"samples": "many", "seed": 1}}"#);
    let out = report(&cfg, &dir.path().join("out"), None);
    assert_eq!(out.status.code(), Some(2));
    // the message names the offending field
    assert!(String::from_utf8_lossy(&out.stderr).contains("mc.samples"));

    let cfg = write_config(dir.path(), "{ not json");
    assert_eq!(report(&cfg, &dir.path().join("out"), None).status.code(), Some(2));

    assert_eq!(bin().args(["report"]).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["frobnicate"]).output().unwrap().status.code(), Some(2));
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let out = bin().arg("catalog").env("MINGAUGE_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn impossible_tolerance_fails_a_check() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{
  "surface": {"name": "plane", "params": {"R_max": 40, "resolution": 48}},
  "mc": {"samples": 1000, "seed": 3},
  "tolerances": {"density": 1e-14}
}"#,
    );
    let out_dir = dir.path().join("out");
    let out = report(&cfg, &out_dir, None);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let rep: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    let failed: Vec<&str> = rep["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "fail")
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["density_identity"]);
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), SMALL_CATENOID);
    let mut outputs = Vec::new();
    for (k, threads) in [None, Some("1"), Some("4")].into_iter().enumerate() {
        let out_dir = dir.path().join(format!("out{k}"));
        let out = report(&cfg, &out_dir, threads);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let json = fs::read(out_dir.join("report.json")).unwrap();
        let csv = fs::read(out_dir.join("sweeps.csv")).unwrap();
        assert!(out_dir.join("run.log").exists());
        outputs.push((json, csv));
    }
    for o in &outputs[1..] {
        assert!(o.0 == outputs[0].0, "report.json differs");
        assert!(o.1 == outputs[0].1, "sweeps.csv differs");
    }
}

#[test]
fn report_matches_the_schema() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), SMALL_CATENOID);
    let out_dir = dir.path().join("out");
    assert_eq!(report(&cfg, &out_dir, None).status.code(), Some(0));
    let schema_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema/report.schema.json");
    let schema: Value = serde_json::from_str(&fs::read_to_string(schema_path).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).unwrap();
    let instance: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    if let Err(errors) = compiled.validate(&instance) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("schema violations:\n{}", msgs.join("\n"));
    }
    // defaults are echoed back
    assert_eq!(instance["config"]["tolerances"]["monotonicity"], 1e-3);
    assert_eq!(instance["schema_version"], "1.0");
    // a non-conforming document is rejected
    let mut broken = instance.clone();
    broken["checks"][0]["status"] = Value::from("maybe");
    assert!(!compiled.is_valid(&broken));
}

#[test]
fn sphere_control_has_no_failing_checks() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), r#"{"surface": {"name": "sphere", "params": {"resolution": 24}}, "mc": {"samples": 1000, "seed": 0}}"#);
    let out_dir = dir.path().join("out");
    let out = report(&cfg, &out_dir, None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let rep: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    let status = |name: &str| {
        rep["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).map(|c| c["status"].as_str().unwrap().to_string())
    };
    // the minimal-surface identities cannot pass on a non-minimal control
    for name in ["minimality", "theorem1", "monotonicity", "density_identity"] {
        assert_eq!(status(name).as_deref(), Some("not_applicable"), "{name}");
    }
}

#[test]
fn crofton_hemisphere_passes() {
    let out = bin().args(["crofton", "--set", "hemisphere", "--samples", "20000", "--resolution", "24"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
    let mismatch = bin().args(["crofton", "--n", "4", "--set", "hemisphere"]).output().unwrap();
    assert_eq!(mismatch.status.code(), Some(2));
}
