//! End-to-end tests against the built binary: argument wiring, program
//! sources (inline, stdin, file), exit codes, and JSON output.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn imp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_imp"))
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim_end().to_string()
}

#[test]
fn run_inline_program() {
    let out = imp()
        .args(["run", "-c", "while x < n do x:=x+1; y:=x+y done", "--env", "x=0,y=0,n=3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "x=3,y=6,n=3");
}

#[test]
fn run_from_stdin() {
    let mut child = imp()
        .args(["run", "-", "--env", "x=5"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"x := x + 1")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "x=6");
}

#[test]
fn run_from_file() {
    let path = std::env::temp_dir().join(format!("imp-cli-test-{}.imp", std::process::id()));
    std::fs::write(&path, "skip").unwrap();
    let out = imp()
        .args(["run", path.to_str().unwrap()])
        .output()
        .unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn exit_codes() {
    // Parse error.
    let out = imp().args(["run", "-c", "x :="]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    // Missing program.
    let out = imp().args(["run"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    // Runtime error.
    let out = imp().args(["run", "-c", "x := 1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Out of fuel.
    let out = imp()
        .args(["run", "-c", "while 0 < 1 do skip done", "--fuel", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    // Refuted condition.
    let out = imp()
        .args([
            "vcg",
            "-c",
            "while x < n do [le(x,n) /\\ pp(y,x)] x:=x+1; y:=x+y done",
            "--post",
            "pp(x,n)",
            "--samples",
            "50",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn json_output_is_valid_json() {
    let out = imp()
        .args(["absint", "-c", "x := 0", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["status"], "ok");
    assert_eq!(v["annotated"], "{ 0 < 1 } x := 0");
    assert_eq!(v["final_env"], "x=[0,0]");
}

#[test]
fn warnings_go_to_stderr() {
    let out = imp()
        .args(["absint", "-c", "x := y + 1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("warning"), "{err}");
    assert!(err.contains("x") && err.contains("y"), "{err}");
}
