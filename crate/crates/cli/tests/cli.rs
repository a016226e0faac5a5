use serde_json::Value;
use std::process::{Command, Output};

fn adl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adl")).args(args).output().expect("spawn adl")
}

fn report(args: &[&str]) -> Value {
    let out = adl(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verify_encoding_is_exhaustive_over_small_rings() {
    let r = report(&["verify-encoding", "--ring", "zmod:16"]);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["passed"], true);
    assert_eq!(r["checks"][0]["details"]["pairs"], 256);
    assert_eq!(r["checks"][0]["details"]["sampled"], false);
    assert!(r.get("wall_time_s").is_none());
}

#[test]
fn zcent_formula_file() {
    let file = concat!(env!("CARGO_MANIFEST_DIR"), "/data/zcent.fol");
    let r = report(&["model-check", "--group", "psl:3:gf:2", "--formula", file, "--const", "c=e:1,3:1"]);
    // E_13 over gf:2 is {1, e13}.
    assert_eq!(r["checks"][0]["details"]["size"], 2);
}

#[test]
fn sentence_gives_truth_value() {
    let r = report(&["model-check", "--group", "cyclic:6", "--formula", "forall x. forall y. x*y = y*x"]);
    assert_eq!(r["checks"][0]["details"]["holds"], true);
    let r = report(&["model-check", "--group", "sl:2:gf:3", "--formula", "forall x. forall y. x*y = y*x"]);
    assert_eq!(r["checks"][0]["details"]["holds"], false);
}

#[test]
fn commutator_width_in_a5() {
    let r = report(&["word-width", "--group", "psl:2:gf:5", "--word", "[x,y]"]);
    let d = &r["checks"][1]["details"];
    assert_eq!(d["image_size"], 60);
    assert_eq!(d["width"], 1);
}

#[test]
fn witt_index_of_hyperbolic_plane() {
    let r = report(&["witt", "--form", "gram:[[0,1],[1,0]]", "--field", "gf:7"]);
    assert_eq!(r["checks"][0]["details"]["witt_index"], 1);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(adl(&["suite", "bogus"]).status.code(), Some(2));
    assert_eq!(adl(&["gcl-coverage", "--group", "psl:1:gf:5", "--alpha", "id"]).status.code(), Some(2));
    assert_eq!(adl(&["model-check", "--group", "cyclic:4", "--formula", "x = "]).status.code(), Some(2));
    assert_eq!(adl(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(adl(&["witt", "--form", "diag:1,1", "--field", "zmod:4"]).status.code(), Some(2));
}

#[test]
fn budget_exhaustion_exits_1() {
    let out = adl(&["--max-assignments", "10", "model-check", "--group", "sl:2:gf:5", "--formula", "forall x. forall y. x*y = y*x"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["suite", "words"];
    let (a, b) = (adl(&args), adl(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let args = ["--seed", "7", "verify-encoding", "--ring", "int", "--samples", "200"];
    assert_eq!(adl(&args).stdout, adl(&args).stdout);
}

#[test]
fn csv_has_one_row_per_check() {
    let out = adl(&["--csv", "gcl-coverage", "--group", "sl:2:gf:3", "--alpha", "e:1,2:1"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rd = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rd.headers().unwrap(), vec!["experiment", "label", "claim_kind", "passed", "details"]);
    assert_eq!(rd.records().count(), 2);
}

#[test]
fn timing_flag_adds_wall_time() {
    let r = report(&["--timing", "witt", "--form", "diag:1,1,1", "--field", "gf:3"]);
    assert!(r["wall_time_s"].as_f64().is_some());
}
