use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

fn run(dir: &Path, sub: &str, config: &str, extra: &[&str]) -> Output {
    let cfg = dir.join("run.json");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_slspec"))
        .arg(sub)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn real_lambdas(v: &Value) -> Vec<f64> {
    v["lambda"].as_array().unwrap().iter().map(|z| z[0].as_f64().unwrap()).collect()
}

#[test]
fn free_spectrum_files() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), "solve", r#"{"potential": {"kind": "fourier"}, "n_max": 6}"#, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let d = real_lambdas(&json(&dir.path().join("out/spectrum_dirichlet.json")));
    let dn = real_lambdas(&json(&dir.path().join("out/spectrum_dirichlet_neumann.json")));
    for k in 1..=6 {
        assert!((d[k - 1] - (k * k) as f64).abs() < 1e-9);
        assert!((dn[k - 1] - (k as f64 - 0.5).powi(2)).abs() < 1e-9);
    }
    let csv = fs::read_to_string(dir.path().join("out/spectrum_dirichlet.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn command_line_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"potential": {"kind": "piecewise_linear", "x": [0, 3.141592653589793], "y": [-3.141592653589793, 0]}, "n_max": 20}"#;
    let out = run(dir.path(), "solve", cfg, &["--nmax", "4", "--bc", "dirichlet"]);
    assert!(out.status.success());
    assert!(!dir.path().join("out/spectrum_dirichlet_neumann.json").exists());
    let d = real_lambdas(&json(&dir.path().join("out/spectrum_dirichlet.json")));
    assert_eq!(d.len(), 4);
    for (k, l) in d.iter().enumerate() {
        let k = (k + 1) as f64;
        assert!((l - k * k - 1.0).abs() < 1e-8);
    }
}

#[test]
fn ensemble_members_are_named_by_seed() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"ensemble": {"theta": 1, "radius": 1, "count": 2, "seed": 7}, "n_max": 3}"#;
    let out = run(dir.path(), "solve", cfg, &["--bc", "d"]);
    assert!(out.status.success());
    for name in ["member_000_seed_7_dirichlet.json", "member_001_seed_8_dirichlet.json"] {
        assert!(dir.path().join("out").join(name).exists(), "{name}");
    }
}

#[test]
fn bad_configs_exit_with_one() {
    let dir = TempDir::new().unwrap();
    for cfg in [
        r#"{"nmax": 3}"#,
        r#"{"potential": {"kind": "fourier"}, "n_max": 0}"#,
        r#"{"potential": {"kind": "piecewise_linear", "x": [0, 1], "y": [0, 0]}}"#,
        "not json",
    ] {
        let out = run(dir.path(), "solve", cfg, &[]);
        assert_eq!(out.status.code(), Some(1), "{cfg}");
    }
    let out = run(dir.path(), "solve", r#"{"potential": {"kind": "fourier"}}"#, &["--bc", "robin"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_writes_report_and_passes() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"potential": {"kind": "piecewise_linear", "x": [0, 3.141592653589793], "y": [-3.141592653589793, 0]}, "theorem": "thm41", "n_max": 60}"#;
    let out = run(dir.path(), "verify", cfg, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("out/report_thm41.json"));
    assert!(report["pass_flags"].as_object().unwrap().values().all(|v| v.as_bool() == Some(true)));
    let csv = fs::read_to_string(dir.path().join("out/report_thm41_sequences.csv")).unwrap();
    assert!(csv.starts_with("k,"));
}

#[test]
fn oracle_summary_reports_agreement() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"potential": {"kind": "fourier", "sin": [0, 0.5]}, "n_max": 5, "oracle_tol": 1e-10}"#;
    let out = run(dir.path(), "oracle", cfg, &["--bc", "dirichlet"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&dir.path().join("out/oracle_dirichlet_summary.json"));
    let diffs = summary["max_relative_difference"].as_object().unwrap();
    assert_eq!(diffs.len(), 3);
    for (name, d) in diffs {
        assert!(d.as_f64().unwrap() < 1e-8, "{name}: {d}");
    }
}

#[test]
fn sensitivity_and_expand_outputs() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"potential": {"kind": "fourier"}, "sensitivity": {"direction": {"kind": "fourier", "sin": [0, 1]}, "ks": [1, 2]}}"#;
    let out = run(dir.path(), "sensitivity", cfg, &["--bc", "dirichlet"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out/sensitivity.json").exists());
    assert!(dir.path().join("out/sensitivity.csv").exists());

    let out = run(dir.path(), "expand", r#"{"potential": {"kind": "fourier", "sin": [0, 1]}, "m": 2}"#, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out/expansion.json").exists());
    assert!(dir.path().join("out/f_table.csv").exists());
}
