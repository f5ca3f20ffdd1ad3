use std::process::{Command, Output};

fn reslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reslab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    reslab(args).status.code().expect("exit code")
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(reslab(args).stdout).unwrap()
}

#[test]
fn reduce_exit_codes() {
    assert_eq!(code(&["reduce", "--term", "I", "--apply", "[I!]"]), 0);
    assert_eq!(code(&["reduce", "(\\x. y) [n; p!]"]), 1);
    assert_eq!(code(&["reduce", "(\\x. x [x!]) [(\\x. x [x!])!]", "--fuel", "50"]), 2);
    assert_eq!(code(&["reduce", "\\x. ("]), 64);
    assert_eq!(code(&["reduce", "--term", "nope"]), 64);
}

#[test]
fn gamma_step_trace() {
    let out = stdout(&["reduce", "tau(tbar(eps))", "--trace"]);
    assert!(out.contains("(step 1 gamma () (sum eps))"), "{out}");
    assert!(out.contains("Converged after 1 steps"), "{out}");
    assert!(out.contains("witness: eps"), "{out}");
}

#[test]
fn the_fixpoint_term_converges() {
    let out = reslab(&["reduce", "--term", "A", "--fuel", "200"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("witness: \\v. \\w. w [(\\x. x) [v!]!]"));
}

#[test]
fn probing_a_with_eps0_runs_out_of_fuel() {
    assert_eq!(code(&["reduce", "tau(A [eps0!])", "--fuel", "300"]), 2);
}

#[test]
fn checks() {
    assert_eq!(code(&["check", "lemma3", "--range", "0..4"]), 0);
    assert_eq!(code(&["check", "lemma5", "--range", "0..4"]), 0);
    assert_eq!(code(&["check", "lemma4-sample"]), 0);
    assert_eq!(code(&["check", "lemma3", "--fuel", "1"]), 3);
}

#[test]
fn semantics_queries() {
    let out = stdout(&["semantics", "typecheck", "\\x. x", "--elem", "[*]::*"]);
    assert!(out.contains("verdict: Yes"), "{out}");
    let out = reslab(&["semantics", "separate", "--left", "I", "--right", "A"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("witness: [*]::*") && text.contains("in-left-not-in-right"), "{text}");
    assert_eq!(code(&["semantics", "separate", "--left", "I", "--right", "I"]), 4);
    assert_eq!(code(&["semantics", "separate", "--left", "I", "--right", "\\x. ("]), 64);
    let out = stdout(&["semantics", "interp", "--term", "0"]);
    assert!(out.contains("members: 0") && out.contains("unknown: 0"), "{out}");
}

#[test]
fn counterexample_and_laws() {
    let out = reslab(&["counterexample"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("result: all stages passed"));
    let out = reslab(&["counterexample", "--fuel", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("failed at stage 1"));
    assert_eq!(code(&["laws", "--max-size", "2", "--bang-cap", "3"]), 0);
}

#[test]
fn sexp_output_is_deterministic_and_embeds_the_config() {
    let args = ["counterexample", "--format", "sexp", "--seed", "5"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    assert!(a.contains("(seed 5)") && a.contains("(fuel 1000)"));
    let args = ["laws", "--max-size", "2", "--bang-cap", "2", "--format", "sexp"];
    assert_eq!(stdout(&args), stdout(&args));
}
