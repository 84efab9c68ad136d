use std::path::Path;
use std::process::{Command, Output};

fn su2lat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_su2lat"))
        .args(args)
        .env("SU2LAT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Data rows of a CSV with `#` comments, header dropped.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn selftest_passes() {
    let o = su2lat(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn rotate_without_beta_is_exact() {
    let o = su2lat(&["rotate", "--ell", "3", "--n", "64", "--beta", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["config"]["n"], 64);
    assert_eq!(v["config"]["ell"], 3);
}

#[test]
fn rotate_through_the_lattice() {
    let o = su2lat(&["rotate", "--ell", "2", "--n", "32", "--alpha", "-0.3", "--beta", "0.8", "--gamma", "1.0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["fidelity"].as_f64().unwrap() > 0.9);
    assert!(v["stages"]["decode_residual"].is_number());
}

#[test]
fn shear_check_rows_are_bijective() {
    let o = su2lat(&["shear-check", "--n", "64"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("theta,n,axis,bijective,max_disp,mean_disp"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| r[3] == "true"));
}

#[test]
fn empty_config_gives_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "empty.toml", "");
    let with = su2lat(&["rotate", "--config", &cfg]);
    let without = su2lat(&["rotate"]);
    assert_eq!(with.status.code(), Some(0), "{}", stderr(&with));
    assert_eq!(stdout(&with), stdout(&without));
}

#[test]
fn bad_grid_in_config_names_n() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "n = 48\n");
    let o = su2lat(&["rotate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).lines().any(|l| l.trim_start().starts_with("n:")), "{}", stderr(&o));
}

#[test]
fn all_violations_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "n = 48\nell = 11\n");
    let o = su2lat(&["rotate", "--config", &cfg, "--t-bits", "20"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    for field in ["ell:", "t-bits:", "n:"] {
        assert!(err.contains(field), "{err}");
    }
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "n = 32\nell = 2\n");
    let o = su2lat(&["rotate", "--config", &cfg, "--n", "64"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["n"], 64);
    assert_eq!(v["config"]["ell"], 2);
}

#[test]
fn config_parse_errors_have_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "broken.toml", "ell = 2\n\nn = = 4\n");
    let o = su2lat(&["rotate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("broken.toml:3:"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(su2lat(&["rotate", "--bogus"]).status.code(), Some(1));
    assert_eq!(su2lat(&["transmogrify"]).status.code(), Some(1));
    assert_eq!(su2lat(&[]).status.code(), Some(1));
    assert_eq!(su2lat(&["--help"]).status.code(), Some(0));
}

#[test]
fn bad_thread_count_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_su2lat"))
        .args(["selftest"])
        .env("SU2LAT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("SU2LAT_THREADS"));
}

#[test]
fn heavy_leakage_is_reported_not_fatal() {
    let o = su2lat(&["rotate", "--ell", "3", "--n", "32", "--beta", "0.7", "--mode", "circuit", "--r0", "6", "--width", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["leakage"].as_f64().unwrap() > 0.5);
    assert!(v["stages"]["uncompute_leakage"].as_f64().unwrap() <= 0.5);
}

#[test]
fn output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = |name: &str| {
        vec![
            "fidelity-sweep".to_string(),
            "--ells".into(),
            "2".into(),
            "--ns".into(),
            "32".into(),
            "--betas".into(),
            "0.4,-1.2".into(),
            "--samples".into(),
            "3".into(),
            "--seed".into(),
            "9".into(),
            "--output".into(),
            dir.path().join(name).to_str().unwrap().into(),
        ]
    };
    for name in ["a.csv", "b.csv"] {
        let a = args(name);
        let o = su2lat(&a.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# command: fidelity-sweep\n# config: {"));
    assert!(text.contains("\"seed\":9"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][2], "-1.2");
}

#[test]
fn json_output_format() {
    let o = su2lat(&["shear-check", "--n", "16", "--axis", "x", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 25);
    assert_eq!(v["config"]["axis"], "x");
}

#[test]
fn remaining_subcommands_run() {
    let o = su2lat(&["prep-check", "--ell", "2", "--n", "32"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[3].parse::<f64>().unwrap() < 1e-10));

    let o = su2lat(&["qpe-check", "--ell", "1", "--n", "32", "--backend", "exact"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| (r[5].parse::<f64>().unwrap() - 1.0).abs() < 1e-9));

    let o = su2lat(&["hyper-hadamard", "--qubits", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("# deviation: "));
    assert_eq!(csv_rows(&text).len(), 4);

    let o = su2lat(&["kicked-top", "--j", "2", "--steps", "3", "--n", "32", "--backend", "shear"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("step,fidelity,jz_exact,jz_lattice,leakage"));
    assert_eq!(csv_rows(&text).len(), 4);
}
