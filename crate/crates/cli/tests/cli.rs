use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn divgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divgraph"))
        .args(args)
        .env_remove("DIVGRAPH_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = divgraph(&all);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn ratio_examples() {
    assert_eq!(json(&["ratio", "r", "1", "2"])["value"], "3/2");
    assert_eq!(json(&["ratio", "v", "8", "98"])["value"], "0");
    assert_eq!(json(&["ratio", "w", "1", "1"])["value"], "1");
    let s = json(&["ratio", "s", "2", "9", "--detail"]);
    assert_eq!(s["detail"]["size_with"], 3);
    assert!(stdout(&divgraph(&["ratio", "r", "1", "2"])).starts_with("r(1, 2) = 3/2"));
}

#[test]
fn oracle_and_verify() {
    assert_eq!(json(&["oracle", "7"])["c"], 2);
    let o = divgraph(&["verify", "r", "9"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("verify r 9: PASS"));
    assert_eq!(json(&["verify", "v", "10"])["result"], "PASS");
}

#[test]
fn conjecture_and_median() {
    let o = divgraph(&["conjecture", "--limit", "60"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("no counterexamples"));
    let m = json(&["median"]);
    assert!((m["lower_frac"].as_f64().unwrap() - 0.168153).abs() < 1e-6);
    assert!((m["upper_frac"].as_f64().unwrap() - 0.391752).abs() < 1e-6);
}

#[test]
fn estimate_single_triple() {
    let c = json(&["estimate", "--constant", "c", "--budget", "1"]);
    assert_eq!(c["lo"], "0.000000000000");
    assert_eq!(c["hi"], "0.500000000000");
    assert_eq!(c["covered_mass"], "1/2");
    let csv = stdout(&divgraph(&["estimate", "--constant", "c", "--budget", "1", "--format", "csv"]));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].split(',').any(|h| h == "covered_mass"));
}

#[test]
fn estimate_alpha_meets_published_range() {
    let a = json(&["estimate", "--constant", "alpha", "--budget", "1000000", "--workers", "2"]);
    let lo: f64 = a["lo"].as_str().unwrap().parse().unwrap();
    let hi: f64 = a["hi"].as_str().unwrap().parse().unwrap();
    assert!(lo <= 1.574445 && 1.572939 <= hi, "[{lo}, {hi}]");
    assert!(lo >= 1.55967);
}

fn estimate_with_cache(path: &Path) -> Output {
    divgraph(&[
        "estimate",
        "--constant",
        "eta",
        "--budget",
        "20000",
        "--cache",
        path.to_str().unwrap(),
        "--format",
        "json",
    ])
}

#[test]
fn cache_resume_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("terms.jsonl");
    let first = estimate_with_cache(&path);
    assert!(first.status.success());
    let records = std::fs::read_to_string(&path).unwrap().lines().count();
    assert!(records > 0);
    let second = estimate_with_cache(&path);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), records);
    let fresh = divgraph(&["estimate", "--constant", "eta", "--budget", "20000", "--format", "json"]);
    assert_eq!(first.stdout, fresh.stdout);
}

#[test]
fn cache_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_divgraph"))
        .args(["estimate", "--constant", "alpha", "--budget", "100"])
        .env("DIVGRAPH_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("terms.jsonl").exists());
}

#[test]
fn exit_codes() {
    assert_eq!(divgraph(&["ratio", "r", "3", "2"]).status.code(), Some(2));
    assert_eq!(divgraph(&["estimate", "--constant", "zeta", "--budget", "3"]).status.code(), Some(2));
    assert_eq!(divgraph(&["estimate", "--constant", "alpha", "--budget", "0"]).status.code(), Some(2));
    assert_eq!(divgraph(&["oracle", "30"]).status.code(), Some(3));
    assert_eq!(
        divgraph(&["ratio", "v", "1", "80", "--max-path-cover", "10"]).status.code(),
        Some(3)
    );

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.jsonl");
    std::fs::write(&path, "{\"kind\":\"r\",\"i\":1,\"d\":1,\"t\":1,\"num\":\"3\",\"den\":\"1\"}\n").unwrap();
    let o = estimate_with_cache(&path);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}
