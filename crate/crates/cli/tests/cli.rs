use std::path::PathBuf;
use std::process::{Command, Output};

fn groups(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../groups").join(file)
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cspda-lab")).args(args).env_remove("CSPDA_LAB_JOBS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_trivial_word() {
    let o = cli(&["check", path(&groups("free_rank2.json")), "-w", "aA"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "REJECT (trivial)");
}

#[test]
fn check_nontrivial_word_reports_witness() {
    let o = cli(&["check", path(&groups("free_rank2.json")), "-w", "ab"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "ACCEPT (nontrivial) witness: ⍟ ⍟");
}

#[test]
fn equiv_with_zero_bound_fails() {
    let o = cli(&["equiv", path(&groups("grigorchuk.json")), "-n", "2", "--init-bound", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("machine_only=0"));
    assert!(!stdout(&o).contains("oracle_only=0"));
}

#[test]
fn equiv_reports_are_identical_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for jobs in ["1", "3"] {
        let json = dir.path().join(format!("r{jobs}.json"));
        let csv = dir.path().join(format!("r{jobs}.csv"));
        let o = cli(&[
            "equiv",
            path(&groups("dihedral.json")),
            "-n",
            "5",
            "--jobs",
            jobs,
            "--report",
            path(&json),
            "--csv",
            path(&csv),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        reports.push((std::fs::read(&json).unwrap(), std::fs::read(&csv).unwrap()));
    }
    assert_eq!(reports[0], reports[1]);
    let report: serde_json::Value = serde_json::from_slice(&reports[0].0).unwrap();
    assert_eq!(report["report_version"], 1);
    assert_eq!(report["counts"]["agree"], report["words"]);
    let rows = String::from_utf8(reports[0].1.clone()).unwrap();
    assert_eq!(rows.lines().count(), 1 + report["words"].as_u64().unwrap() as usize);
}

#[test]
fn build_then_check_machine_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f2.json");
    let o = cli(&["build", path(&groups("free_rank2.json")), "-o", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let o = cli(&["check", path(&out), "-w", "a b", "--init-bound", "4"]);
    assert_eq!(stdout(&o).trim(), "ACCEPT witness: ⍟ ⍟");
    let o = cli(&["check", path(&out), "-w", "a A"]);
    assert_eq!(stdout(&o).trim(), "REJECT");
}

#[test]
fn symbol_order_changes_witness() {
    let g = groups("grigorchuk.json");
    let o = cli(&["check", path(&g), "-w", "a b"]);
    assert_eq!(stdout(&o).trim(), "ACCEPT (nontrivial) witness: 0 ⍟");
    let o = cli(&["check", path(&g), "-w", "a b", "--symbol-order", "1,0"]);
    assert_eq!(stdout(&o).trim(), "ACCEPT (nontrivial) witness: 1 ⍟");
}

#[test]
fn trace_prints_events() {
    let o = cli(&["trace", path(&groups("free_rank2.json")), "--init", "⍟", "-w", "ab"]);
    assert_eq!(o.status.code(), Some(0));
    let last: serde_json::Value = serde_json::from_str(stdout(&o).lines().last().unwrap()).unwrap();
    assert_eq!(last["outcome"], "failed");
}

#[test]
fn audit_certifies() {
    let o = cli(&["audit", path(&groups("free_rank2.json")), "--samples", "200", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["certified"], true);
    assert_eq!(report["config"]["seed"], 5);
}

#[test]
fn schema_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"name": "x", "group": {"kind": "freee", "alphabet": [["a"]]}}"#).unwrap();
    let o = cli(&["check", path(&bad), "-w", "a"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("group"));
    let o = cli(&["equiv"]);
    assert_eq!(o.status.code(), Some(2));
}
