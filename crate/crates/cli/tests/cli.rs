use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

fn explab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_explab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("EXPLAB_WORKERS", "1")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn estimate_delta_writes_all_outputs() {
    let dir = TempDir::new().unwrap();
    let o = explab(&["estimate-delta", "--group", "schottky:k=2,t=3", "--L", "8"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let delta = json(&dir.path().join("delta.json"));
    let p = &delta["estimates"]["pressure"];
    assert_eq!(p["method"], "pressure_root");
    assert_eq!(delta["estimates"]["counting"]["method"], "counting_regression");
    let v = p["value"].as_f64().unwrap();
    assert!(v > 3f64.ln() / 3.0 && v < 1.0, "{v}");
    let csv = fs::read_to_string(dir.path().join("orbit.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("word,length,displacement"));
    assert_eq!(lines.next(), Some("1,0,0"));
    assert_eq!(lines.next(), Some("a,1,3"));
    assert_eq!(csv.lines().count(), 1 + 13_121);
    assert_eq!(json(&dir.path().join("manifest.json"))["command"], "estimate-delta");
}

#[test]
fn verify_all_runs_four_passing_checks() {
    let dir = TempDir::new().unwrap();
    let o = explab(&["verify-lemmas", "--all", "--L", "6", "--s", "0.5"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let m = json(&dir.path().join("manifest.json"));
    let checks = m["checks"].as_object().unwrap();
    let names: Vec<&str> = checks.keys().map(String::as_str).collect();
    assert_eq!(names, ["lemma1_coset", "main_chain", "projection_cosine", "triangle_conjugation"]);
    assert!(checks.values().all(|c| c["pass"] == true));
    assert_eq!(m["pass"], true);
}

#[test]
fn injection_scan_free_case() {
    let dir = TempDir::new().unwrap();
    let o = explab(&["injection-scan", "--case", "free", "--h0", "abAB", "--L", "8"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r = &json(&dir.path().join("manifest.json"))["injection_scan"];
    assert_eq!(r["scanned"], 13_121);
    assert_eq!(r["collisions"].as_array().unwrap().len(), 0);
    assert_eq!(r["kernel_failures"].as_array().unwrap().len(), 0);
}

#[test]
fn injection_scan_malnormal_default_subgroup() {
    let dir = TempDir::new().unwrap();
    let o = explab(&["injection-scan", "--case", "malnormal", "--L", "5"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let m = json(&dir.path().join("manifest.json"));
    assert_eq!(m["injection_scan"]["case"], "malnormal");
    assert_eq!(m["config"]["subgroup"], serde_json::json!(["aabAAB", "abbABB"]));
}

#[test]
fn non_malnormal_subgroup_is_rejected() {
    let dir = TempDir::new().unwrap();
    let o = explab(&["injection-scan", "--case", "malnormal", "--subgroup", "aa,b", "--L", "3"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("malnormal"), "{}", stderr(&o));
}

#[test]
fn failed_check_exits_one_with_witness() {
    let dir = TempDir::new().unwrap();
    let o = explab(&["injection-scan", "--case", "free", "--h0", "a", "--L", "3"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("witness") && err.contains("kernel_failures"), "{err}");
    let m = json(&dir.path().join("manifest.json"));
    assert_eq!(m["pass"], false);
    assert!(!m["injection_scan"]["kernel_failures"].as_array().unwrap().is_empty());
}

#[test]
fn reports_are_byte_identical_across_runs_and_worker_counts() {
    let runs: Vec<TempDir> = (0..3).map(|_| TempDir::new().unwrap()).collect();
    for (dir, workers) in runs.iter().zip(["1", "1", "3"]) {
        let o = explab(&["report", "--L", "7", "--workers", workers], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for name in ["manifest.json", "delta.json", "orbit.csv"] {
        let first = fs::read(runs[0].path().join(name)).unwrap();
        for dir in &runs[1..] {
            assert!(first == fs::read(dir.path().join(name)).unwrap(), "{name} differs");
        }
    }
}

#[test]
fn empty_config_file_gives_defaults() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("empty.json");
    fs::write(&cfg, "").unwrap();
    let o = explab(&["injection-scan", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let c = &json(&dir.path().join("manifest.json"))["config"];
    assert_eq!(c["L"], 10);
    assert_eq!(c["group"], serde_json::json!({"kind": "schottky_symmetric", "k": 2, "t": 3.0}));
}

#[test]
fn flags_override_config_file() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"L": 4, "h0": "abAB", "group": {"kind": "schottky_symmetric", "k": 2, "t": 3.5}}"#).unwrap();
    let o = explab(&["injection-scan", "--config", cfg.to_str().unwrap(), "--L", "5"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let c = &json(&dir.path().join("manifest.json"))["config"];
    assert_eq!(c["L"], 5);
    assert_eq!(c["group"]["t"], 3.5);
}

#[test]
fn malformed_config_value_exits_two_naming_the_key() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"group": {"kind": "schottky_symmetric", "k": 2, "t": "x"}}"#).unwrap();
    let o = explab(&["estimate-delta", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("group.t"), "{}", stderr(&o));
    assert!(!dir.path().join("manifest.json").exists());

    let o = explab(&["estimate-delta", "--group", "schottky:k=2,t=x"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("group.t"), "{}", stderr(&o));
}

#[test]
fn unknown_config_key_exits_two() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"cutoff": 3}"#).unwrap();
    let o = explab(&["estimate-delta", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cutoff"), "{}", stderr(&o));
}

#[test]
fn invalid_values_exit_two() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["estimate-delta", "--L", "0"][..],
        &["estimate-delta", "--hom", "cyclic:n=2"][..],
        &["verify-lemmas"][..],
        &["subgroup-delta", "--window", "3"][..],
    ] {
        let o = explab(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn worker_env_fallback_is_validated() {
    let dir = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_explab"))
        .args(["estimate-delta", "--L", "3", "--out"])
        .arg(dir.path())
        .env("EXPLAB_WORKERS", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("EXPLAB_WORKERS"), "{}", stderr(&o));
}
