//! End-to-end tests of the `massa` binary: exit codes, output shapes, and
//! the JSON pipe between `run` and `derive`.

use serde_json::Value;
use std::io::Write;
use std::process::{Command, Output, Stdio};

fn massa(args: &[&str]) -> Output {
    run_with_stdin(args, None)
}

fn run_with_stdin(args: &[&str], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_massa"));
    cmd.args(args)
        .env("MASSA_COLOR", "never")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    let mut child = cmd.spawn().expect("binary spawns");
    if let Some(text) = stdin {
        child
            .stdin
            .as_mut()
            .expect("stdin piped")
            .write_all(text.as_bytes())
            .expect("stdin accepts input");
    }
    drop(child.stdin.take());
    child.wait_with_output().expect("binary runs to completion")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn classify_directedness_is_sahlqvist() {
    let out = massa(&["classify", "dia box p -> box dia p"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("analytic Sahlqvist"));
}

#[test]
fn classify_mckinsey_is_rejected_with_exit_one() {
    let out = massa(&["classify", "box dia p -> dia box p"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("not analytic inductive"));
}

#[test]
fn parse_errors_go_to_stderr_with_an_offset() {
    let out = massa(&["classify", "box (p ->"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("byte"), "stderr: {}", stderr(&out));
}

#[test]
fn run_directedness_emits_the_dir_rule_as_json() {
    let out = massa(&["run", "dia box p -> box dia p", "--format", "json"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).expect("stdout is JSON");
    assert_eq!(v["status"], "success");
    assert_eq!(v["rule"]["name"], "Dir");
    assert_eq!(
        v["axiom"],
        "forall x y z. (x R y & x R z) -> exists t. (y R t & z R t)"
    );
    assert_eq!(v["derivation"]["rule"], "->_R");
}

#[test]
fn run_mckinsey_exits_three_with_a_stuck_report() {
    let out = massa(&["run", "box dia p -> dia box p"]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("failed at chaining"));
}

#[test]
fn run_with_verification_reports_agreement() {
    let out = massa(&["run", "dia p -> box p", "--verify", "3"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("rule Fun"), "stdout: {text}");
    assert!(text.contains("agree on all frames"), "stdout: {text}");
}

#[test]
fn verify_accepts_seriality_for_the_d_axiom() {
    let out = massa(&[
        "verify",
        "box p -> dia p",
        "forall x. exists y. x R y",
        "--bound",
        "3",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("correspondence holds"));
}

#[test]
fn verify_reports_a_counterexample_frame_with_exit_four() {
    let out = massa(&[
        "verify",
        "box p -> p",
        "forall x. exists y. x R y",
        "--bound",
        "2",
    ]);
    assert_eq!(code(&out), 4);
    assert!(stdout(&out).contains("counterexample: n="));
}

#[test]
fn run_json_pipes_into_derive() {
    let report = massa(&["run", "dia box p -> box dia p", "--format", "json"]);
    assert_eq!(code(&report), 0);
    let out = run_with_stdin(&["derive"], Some(&stdout(&report)));
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("[Dir]"));
}

#[test]
fn derive_rejects_a_tampered_report() {
    let report = massa(&["run", "dia box p -> box dia p", "--format", "json"]);
    let tampered = stdout(&report).replacen("\"->_R\"", "\"box_R\"", 1);
    let out = run_with_stdin(&["derive"], Some(&tampered));
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("does not check out"));
}

#[test]
fn derive_emits_a_standalone_latex_document() {
    let out = massa(&["derive", "p | ~p", "--format", "latex"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("\\documentclass"));
    assert!(text.contains("\\begin{prooftree}"));
    assert!(text.trim_end().ends_with("\\end{document}"));
}

#[test]
fn derive_propagates_run_failures() {
    let out = massa(&["derive", "p -> dia box p"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("failed at"));
}

#[test]
fn frames_filters_by_a_condition() {
    let out = massa(&[
        "frames",
        "--bound",
        "2",
        "--satisfying",
        "forall x. x R x",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("n=1; R={(0,0)}"));
    assert!(text.contains("5 frame(s)"), "stdout: {text}");
}

#[test]
fn batch_mode_emits_one_json_object_per_line() {
    let input = "box p -> p\nbox dia p -> dia box p\n";
    let out = run_with_stdin(&["run", "--batch", "--format", "json"], Some(input));
    assert_eq!(code(&out), 3, "one of the runs gets stuck");
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let first: Value = serde_json::from_str(lines[0]).expect("line 1 is JSON");
    let second: Value = serde_json::from_str(lines[1]).expect("line 2 is JSON");
    assert_eq!(first["status"], "success");
    assert_eq!(first["rule"]["name"], "Refl");
    assert_eq!(second["status"], "failure");
    assert_eq!(second["stage"], "chaining");
}

#[test]
fn corpus_flag_generates_and_verifies_formulas() {
    let out = massa(&[
        "run", "--corpus", "3", "--seed", "7", "--format", "json", "--verify", "2",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3);
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).expect("JSON line");
        assert_eq!(v["status"], "success", "line: {line}");
    }
}

#[test]
fn colour_is_suppressed_when_disabled() {
    let out = massa(&["run", "dia box p -> box dia p"]);
    assert!(!stdout(&out).contains('\x1b'));
}

#[test]
fn positional_formula_and_file_are_mutually_exclusive() {
    let out = massa(&["classify", "p", "--file", "somewhere.txt"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn bounds_above_five_are_rejected() {
    let out = massa(&[
        "verify",
        "box p -> p",
        "forall x. x R x",
        "--bound",
        "9",
    ]);
    assert_eq!(code(&out), 2);
}
