use std::path::Path;
use std::process::{Command, Output};

use glfour_harness::config::DEFAULT_TOML;
use glfour_harness::RunReport;

fn verify(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verify")).args(args).current_dir(dir).output().expect("binary runs")
}

fn report(path: &Path) -> RunReport {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn single_suite_writes_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = verify(&["densities", "--out", "r.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("densities") && stdout.contains("PASS"));
    let r = report(&dir.path().join("r.json"));
    assert_eq!(r.schema_version, 1);
    assert_eq!(r.suites.len(), 1);
    assert!(r.ok);
}

#[test]
fn suite_filter_selects_in_canonical_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = verify(&["all", "--suite", "densities", "--suite", "commutators", "--out", "r.json"], dir.path());
    assert!(out.status.success());
    let names: Vec<String> = report(&dir.path().join("r.json")).suites.into_iter().map(|s| s.suite).collect();
    assert_eq!(names, ["commutators", "densities"]);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let out = verify(&["intertwiner", "--seed", "11", "--out", name], dir.path());
        assert!(out.status.success());
    }
    let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.json"), read("b.json"));
    assert_eq!(report(&dir.path().join("a.json")).seed, 11);
    let out = verify(&["intertwiner", "--seed", "12", "--out", "c.json"], dir.path());
    assert!(out.status.success());
    assert_ne!(read("a.json"), read("c.json"));
}

#[test]
fn passing_control_fails_the_run() {
    let dir = tempfile::tempdir().unwrap();
    // A tolerance loose enough to accept the corrupted case.
    let cfg = DEFAULT_TOML.replace("tolerance = 1e-4", "tolerance = 0.5");
    std::fs::write(dir.path().join("loose.toml"), cfg).unwrap();
    let out = verify(&["intertwiner", "--config", "loose.toml", "--out", "r.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let r = report(&dir.path().join("r.json"));
    assert!(!r.ok);
    assert!(r.suites[0].summary.checks_passed == r.suites[0].summary.checks);
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), DEFAULT_TOML.replace("window = 2.0", "window = 0.1")).unwrap();
    let out = verify(&["densities", "--config", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let out = verify(&["densities", "--config", "missing.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_suite_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = verify(&["all", "--suite", "nope"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn complex_flag_enables_complex_suites() {
    let dir = tempfile::tempdir().unwrap();
    let out = verify(&["all", "--fast", "--complex", "--suite", "complex-spot", "--out", "r.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(&dir.path().join("r.json"));
    assert!(r.fast);
    assert_eq!(r.suites[0].suite, "complex-spot");
    assert_eq!(r.suites[0].extra["e14_sign"], "plus");
}
