//! Compiles and runs a small C program against the generated header and
//! the static library, proving the ABI from the consumer side.

use std::env;
use std::fs;
use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "fsrec.h"

int main(void) {
    FsrecSnapshot *base = NULL, *replica = NULL, *rebuilt = NULL;
    FsrecSequence *seq = NULL;
    char *text = NULL;

    if (fsrec_snapshot_parse("fsrec-snapshot v1\na\tD\td0\na/b\tF\tf0\n", &base)
            != FSREC_STATUS_OK)
        return 1;
    if (fsrec_snapshot_parse("fsrec-snapshot v1\na\tD\td0\na/b\tF\tf1\n", &replica)
            != FSREC_STATUS_OK)
        return 2;
    if (fsrec_detect(base, replica, &seq) != FSREC_STATUS_OK)
        return 3;
    if (fsrec_sequence_len(seq) != 1)
        return 4;
    if (fsrec_apply(base, seq, &rebuilt) != FSREC_STATUS_OK)
        return 5;
    if (fsrec_snapshot_to_string(rebuilt, &text) != FSREC_STATUS_OK)
        return 6;
    if (strcmp(text, "fsrec-snapshot v1\na\tD\td0\na/b\tF\tf1\n") != 0)
        return 7;

    fsrec_string_free(text);
    fsrec_sequence_free(seq);
    fsrec_snapshot_free(base);
    fsrec_snapshot_free(replica);
    fsrec_snapshot_free(rebuilt);
    puts("c smoke ok");
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests run from the crate root; the build artifacts sit in the
    // workspace target directory
    let mut dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    dir.pop();
    dir.pop();
    dir.join("target").join("debug")
}

#[test]
fn c_program_links_and_runs() {
    let staticlib = target_dir().join("libfsrec_capi.a");
    assert!(
        staticlib.exists(),
        "static library missing at {}",
        staticlib.display()
    );
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let scratch = tempfile::Builder::new()
        .prefix("fsrec-c-smoke")
        .tempdir()
        .unwrap();
    let source = scratch.path().join("smoke.c");
    fs::write(&source, PROGRAM).unwrap();
    let exe = scratch.path().join("smoke");

    let compile = Command::new("cc")
        .arg(&source)
        .arg("-I")
        .arg(&include)
        .arg(&staticlib)
        .arg("-lpthread")
        .arg("-ldl")
        .arg("-lm")
        .arg("-o")
        .arg(&exe)
        .output()
        .expect("cc available");
    assert!(
        compile.status.success(),
        "compile failed: {}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&exe).output().unwrap();
    assert_eq!(
        run.status.code(),
        Some(0),
        "stdout: {} stderr: {}",
        String::from_utf8_lossy(&run.stdout),
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "c smoke ok");
}
