use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::NamedTempFile;

use tuplerc::corpus;

fn spec_file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn tuplerc(args: &[&str], file: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tuplerc"));
    cmd.arg(args[0]).arg(file).args(&args[1..]);
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn run_normalizes() {
    let f = spec_file(corpus::D_ADD);
    let o = tuplerc(&["run", "d (s 0)"], f.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "s (s 0)\nsteps: 2\n");

    let o = tuplerc(&["run", "d (s 0)", "--json", "--trace"], f.path());
    let v = json(&o);
    assert_eq!(v["status"], "normal");
    assert_eq!(v["normal_form"], "s (s 0)");
    assert_eq!(v["steps"], 2);
    assert_eq!(v["trace"].as_array().unwrap().len(), 2);
    assert_eq!(v["trace"][0]["term"], "d (s 0)");
}

#[test]
fn run_reports_fuel_exhaustion() {
    let f = spec_file("sort nat\n0 :: nat\nf :: nat => nat\nvar x :: nat\nf x -> f x\n");
    let o = tuplerc(&["run", "f 0", "--fuel", "5", "--json"], f.path());
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    assert_eq!(v["status"], "fuel_exhausted");
    assert_eq!(v["steps"], 5);
}

#[test]
fn dh_of_doubling() {
    let f = spec_file(corpus::D_ADD);
    let o = tuplerc(&["dh", "d (s (s 0))"], f.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "3\n");
    let o = tuplerc(&["dh", "add (s 0) (s (s 0))", "--json"], f.path());
    assert_eq!(json(&o)["dh"], 3);
}

#[test]
fn rc_rows() {
    let f = spec_file(corpus::D_ONLY);
    let o = tuplerc(&["rc", "--max-n", "4", "--json"], f.path());
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<(u64, u64)> = json(&o)
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["n"].as_u64().unwrap(), r["rc"].as_u64().unwrap()))
        .collect();
    assert_eq!(rows, [(1, 0), (2, 1), (3, 2), (4, 3)]);
}

#[test]
fn check_exit_codes() {
    let f = spec_file(corpus::D_ADD);
    let o = tuplerc(&["check"], f.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("overall: Compatible\n"));

    let f = spec_file(corpus::MAP_VERBATIM);
    let o = tuplerc(&["check", "--json"], f.path());
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["overall"], "incompatible");
    assert_eq!(v["rules"][1]["verdict"]["status"], "refuted");

    let f = spec_file("sort nat\n0 :: nat\n");
    let o = tuplerc(&["check"], f.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no interpretations"));
}

#[test]
fn validate_outcomes() {
    let f = spec_file(corpus::MAP_CORRECTED);
    let o = tuplerc(&["validate", "--max-n", "7", "--main-only", "--json"], f.path());
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["violations"].as_array().unwrap().is_empty());
    let terms = v["terms"].as_array().unwrap();
    assert!(!terms.is_empty());
    assert!(terms.iter().all(|t| t["term"].as_str().unwrap().starts_with("main ")));

    let f = spec_file(corpus::MAP_VERBATIM);
    let o = tuplerc(&["validate", "--max-n", "4"], f.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not certified compatible"));

    let f = spec_file(corpus::D_ADD);
    let o = tuplerc(&["validate", "--main-only"], f.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn parse_errors_carry_positions() {
    let f = spec_file("sort nat\n0 :: nat\nd :: nat => bogus\n");
    let o = tuplerc(&["check"], f.path());
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains(&format!("{}:3:", f.path().display())), "{err}");

    let f = spec_file(corpus::D_ADD);
    let o = tuplerc(&["run", "d nil"], f.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_and_help() {
    let bin = env!("CARGO_BIN_EXE_tuplerc");
    let o = Command::new(bin).arg("frobnicate").output().unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("validate"));
    let o = Command::new(bin).arg("--version").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(bin)
        .args(["check", "/nonexistent/file.trs"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn output_is_deterministic() {
    let f = spec_file(corpus::MAP_CORRECTED);
    for args in [
        &["check", "--json"][..],
        &["validate", "--max-n", "6", "--jobs", "3"][..],
        &["rc", "--max-n", "6", "--json"][..],
    ] {
        let a = tuplerc(args, f.path());
        let b = tuplerc(args, f.path());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
    let a = tuplerc(&["validate", "--max-n", "6", "--jobs", "1", "--json"], f.path());
    let b = tuplerc(&["validate", "--max-n", "6", "--jobs", "4", "--json"], f.path());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn spec_examples() {
    let f = spec_file(corpus::D_ADD);
    let o = tuplerc(&["run", "0"], f.path());
    assert_eq!(stdout(&o), "0\nsteps: 0\n");
    let o = tuplerc(&["dh", "add (s 0) (s (s 0))"], f.path());
    assert_eq!(stdout(&o), "3\n");

    let f = spec_file(corpus::MAP_CORRECTED);
    let o = tuplerc(&["validate", "--max-n", "8"], f.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(" 0 violations, 0 inconclusive"), "{}", stdout(&o));
}

#[test]
fn exhausted_budgets_are_inconclusive() {
    let f = spec_file(corpus::D_ADD);
    let o = tuplerc(&["dh", "d (add (s (s 0)) (s (s 0)))", "--fuel", "2"], f.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("budget exhausted"));

    let o = tuplerc(&["validate", "--max-n", "6", "--fuel", "2", "--json"], f.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(json(&o)["inconclusive"].as_u64().unwrap() > 0);

    let o = tuplerc(&["rc", "--max-n", "6", "--fuel", "2"], f.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains(">="));
}
