use std::fs;
use std::process::{Command, Output};

fn lpplab(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lpplab"));
    cmd.args(args).env_remove("LPPLAB_SEED");
    if let Some(s) = seed_env {
        cmd.env("LPPLAB_SEED", s);
    }
    cmd.output().unwrap()
}

fn report_seed(path: &std::path::Path) -> u64 {
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    json["config"]["seed"].as_u64().unwrap()
}

#[test]
fn deterministic_suite_exits_zero() {
    let out = lpplab(&["--suite", "deterministic", "--seed", "1", "--quick"], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().last().unwrap().starts_with("PASS suite deterministic"));
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(lpplab(&["--suite", "bogus"], None).status.code(), Some(2));
    assert_eq!(lpplab(&["--suite", "deterministic", "--r", "4,1"], None).status.code(), Some(2));
    assert_eq!(lpplab(&["--config", "/nonexistent/config.json"], None).status.code(), Some(2));
    assert_eq!(lpplab(&["--suite", "deterministic", "--quick"], Some("abc")).status.code(), Some(2));
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let r = report.to_str().unwrap();
    let base = ["--suite", "deterministic", "--quick", "--out", r];

    lpplab(&base, Some("77"));
    assert_eq!(report_seed(&report), 77);

    let mut with_flag = base.to_vec();
    with_flag.extend(["--seed", "5"]);
    lpplab(&with_flag, Some("77"));
    assert_eq!(report_seed(&report), 5);

    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"seed": 11}"#).unwrap();
    let mut with_file = base.to_vec();
    with_file.extend(["--config", cfg.to_str().unwrap()]);
    lpplab(&with_file, Some("77"));
    assert_eq!(report_seed(&report), 11);

    fs::write(&cfg, r#"{"suite": "deterministic"}"#).unwrap();
    lpplab(&with_file, Some("78"));
    assert_eq!(report_seed(&report), 78);
}

#[test]
fn csv_report_goes_to_stdout() {
    let out = lpplab(&["--suite", "deterministic", "--quick", "--format", "csv"], None);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("name,statistic,threshold,p_value,pass,n,seed,runtime_ms\n"));
    assert!(stdout.contains("c1/max-abs-error,"));
}

#[test]
fn export_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = lpplab(&["export", "--replicas", "20", "--heights", "16", "--out", d], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["busemann_exact.csv", "busemann_exact_hist.csv", "busemann_prelimit_n16.csv", "busemann_prelimit_n16_hist.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let exact = fs::read_to_string(dir.path().join("busemann_exact.csv")).unwrap();
    assert_eq!(exact.lines().count(), 21);
}
