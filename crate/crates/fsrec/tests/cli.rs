//! Command-line behavior: exit codes, diagnostics, pipeline plumbing.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_fsrec")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let Output {
        status,
        stdout,
        stderr,
    } = Command::new(bin()).args(args).output().unwrap();
    (
        status.code().unwrap(),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, content: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        fs::write(&path, content).unwrap();
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn scan_writes_sorted_snapshot_to_stdout() {
    let ws = Workspace::new();
    fs::create_dir(ws.path("tree")).unwrap();
    fs::create_dir(ws.path("tree/sub")).unwrap();
    fs::write(ws.path("tree/sub/file"), "content").unwrap();
    let (code, stdout, _) = run(&["scan", p(&ws.path("tree"))]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "fsrec-snapshot v1");
    assert!(lines[1].starts_with("root\tD\tdir"));
    assert!(lines[2].starts_with("root/sub\tD\tdir"));
    assert!(lines[3].starts_with("root/sub/file\tF\t"));
}

#[test]
fn detect_and_apply_round_trip_through_files() {
    let ws = Workspace::new();
    let base = ws.file(
        "base.snap",
        "fsrec-snapshot v1\na\tD\td0\na/b\tF\tf0\n",
    );
    let replica = ws.file("replica.snap", "fsrec-snapshot v1\na\tD\td0\n");
    let seq = ws.path("diff.seq");
    let (code, _, _) = run(&[
        "detect",
        "--base",
        p(&base),
        "--replica",
        p(&replica),
        "-o",
        p(&seq),
    ]);
    assert_eq!(code, 0);
    assert_eq!(fs::read_to_string(&seq).unwrap(), "a/b\tF\tE:e0\n");
    let (code, stdout, _) = run(&["apply", p(&base), p(&seq)]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "fsrec-snapshot v1\na\tD\td0\n");
}

#[test]
fn apply_rejects_breaking_sequence_with_exit_2() {
    let ws = Workspace::new();
    let snap = ws.file("s.snap", "fsrec-snapshot v1\na\tF\tf0\n");
    let seq = ws.file("s.seq", "a\tD\tE:e0\n");
    let (code, _, stderr) = run(&["apply", p(&snap), p(&seq)]);
    assert_eq!(code, 2);
    assert!(stderr.contains("breaks the snapshot"));
}

#[test]
fn normalize_collapses_a_log() {
    let ws = Workspace::new();
    let log = ws.file("log.seq", "a\tE\tF:f0\na\tF\tF:f1\n");
    let (code, stdout, _) = run(&["normalize", p(&log)]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "a\tE\tF:f1\n");
}

#[test]
fn parse_errors_carry_line_numbers_and_exit_2() {
    let ws = Workspace::new();
    let bad = ws.file("bad.seq", "a\tQ\tF:f0\n");
    let (code, _, stderr) = run(&["normalize", p(&bad)]);
    assert_eq!(code, 2);
    assert!(stderr.contains("line 1"), "stderr: {stderr}");
    assert!(stderr.contains("unknown type tag"), "stderr: {stderr}");

    let bad = ws.file("bad.snap", "fsrec-snapshot v1\na\tF\tf0\na/b\tF\tf0\n");
    let (code, _, stderr) = run(&["apply", p(&bad), p(&ws.file("empty.seq", ""))]);
    assert_eq!(code, 2);
    assert!(stderr.contains("a/b"), "stderr: {stderr}");
}

#[test]
fn check_refluent_exit_codes() {
    let ws = Workspace::new();
    let seq_a = ws.file("a.seq", "a\tF\tF:f0\n");
    let seq_b = ws.file("b.seq", "a\tF\tF:f1\n");
    let (code, stdout, _) = run(&["check", "--refluent", p(&seq_a), p(&seq_b)]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "refluent");

    let seq_c = ws.file("c.seq", "a\tD\tD:d1\n");
    let (code, stdout, _) = run(&["check", "--refluent", p(&seq_a), p(&seq_c)]);
    assert_eq!(code, 1);
    assert_eq!(stdout.trim(), "not refluent");

    // breaking input is an error, not a verdict
    let breaking = ws.file("broken.seq", "a\tD\tE:e0\na/b\tF\tE:e0\n");
    let (code, _, stderr) = run(&["check", "--refluent", p(&seq_a), p(&breaking)]);
    assert_eq!(code, 2);
    assert!(stderr.contains("breaks every filesystem"));
}

#[test]
fn reconcile_conflict_free_exits_0() {
    let ws = Workspace::new();
    let seq_a = ws.file("a.seq", "a/b\tF\tF:f1\n");
    let seq_b = ws.file("b.seq", "a/c\tE\tF:f0\n");
    let to_a = ws.path("to_a.seq");
    let to_b = ws.path("to_b.seq");
    let (code, _, stderr) = run(&[
        "reconcile",
        p(&seq_a),
        p(&seq_b),
        "--to-a",
        p(&to_a),
        "--to-b",
        p(&to_b),
    ]);
    assert_eq!(code, 0, "stderr: {stderr}");
    assert_eq!(fs::read_to_string(&to_a).unwrap(), "a/c\tE\tF:f0\n");
    assert_eq!(fs::read_to_string(&to_b).unwrap(), "a/b\tF\tF:f1\n");
    assert!(stderr.contains("conflicts: 0"));
}

#[test]
fn reconcile_structural_conflicts_in_report() {
    let ws = Workspace::new();
    // one side deletes file and directory, the other edits the file
    let seq_a = ws.file("a.seq", "a/b\tF\tE:e0\na\tD\tE:e0\n");
    let seq_b = ws.file("b.seq", "a/b\tF\tF:f1\n");
    let report = ws.path("report.txt");
    let (code, _, _) = run(&[
        "reconcile",
        p(&seq_a),
        p(&seq_b),
        "--conflicts",
        p(&report),
    ]);
    assert_eq!(code, 1);
    let report = fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "same-node\ta/b\t(a/b,F,F:f1)\t(a/b,F,E:e0)");
    assert_eq!(lines[1], "order\ta\t(a,D,E:e0)\t(a/b,F,F:f1)");
}

#[test]
fn reconcile_rejects_non_refluent_inputs() {
    let ws = Workspace::new();
    let seq_a = ws.file("a.seq", "a\tF\tF:f0\n");
    let seq_b = ws.file("b.seq", "a\tD\tD:d1\n");
    let (code, _, stderr) = run(&["reconcile", p(&seq_a), p(&seq_b)]);
    assert_eq!(code, 2);
    assert!(stderr.contains("not refluent"));
}

#[test]
fn missing_files_exit_2() {
    let (code, _, stderr) = run(&["normalize", "/nonexistent/x.seq"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("error:"));
}
