use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn koehler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_koehler")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn fixture() -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", "triple.json"].iter().collect();
    p.to_string_lossy().into_owned()
}

#[test]
fn theta_of_gaussian_character() {
    let out = koehler(&["theta", "--disc", "-4", "--modulus", "(1)", "--bound", "10"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["level"], 4);
    assert_eq!(v["coeffs"].as_array().unwrap().len(), 10);
    let fast = out.stdout;
    let slow = koehler(&["theta", "--disc", "-4", "--modulus", "(1)", "--bound", "10", "--oracle"]).stdout;
    assert_eq!(fast, slow);
}

#[test]
fn theta_bound_one() {
    let out = koehler(&["theta", "--disc", "-23", "--char", "1", "--bound", "1"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["coeffs"].as_array().unwrap().len(), 1);
}

#[test]
fn malformed_input_exits_two() {
    let out = koehler(&["theta", "--disc", "x", "--bound", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "input");
    let out = koehler(&["theta", "--disc", "-5", "--bound", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oversized_bound_exits_three() {
    let out = koehler(&["theta", "--disc", "-23", "--char", "1", "--bound", "2000000"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn quaternion_row() {
    let out = koehler(&["verify-group", "--line", "3", "--r", "1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["name"], "Q8");
    assert!(v["equivalences"].as_array().unwrap().iter().all(|b| b == true));
    assert_eq!(v["inducing_pairs"], 3);
}

#[test]
fn cubic_character_has_no_partners() {
    let out = koehler(&["partners", "--disc", "-23", "--char", "1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["partners"].as_array().unwrap().is_empty());
    assert!(v["triple_certificate"].is_null());
}

#[test]
fn partners_of_pinned_member() {
    let a = koehler(&["partners", "--disc", "-3", "--modulus", "[13,5,1]", "--char", "1"]);
    let b = koehler(&["--sequential", "partners", "--disc", "-3", "--modulus", "[13,5,1]", "--char", "1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let discs: Vec<i64> = v["partners"].as_array().unwrap().iter().map(|p| p["disc"].as_i64().unwrap()).collect();
    assert_eq!(discs, [13, -39]);
    let pinned: Value = serde_json::from_str(&std::fs::read_to_string(fixture()).unwrap()).unwrap();
    assert_eq!(v["triple_certificate"], pinned["certificate"]);
}

#[test]
fn counterexample_and_extension() {
    let f = fixture();
    let out = koehler(&["counterexample", "--triple", &f]);
    assert!(out.status.success());
    assert_eq!(json(&out)["report"]["p"], 7);

    let out = koehler(&["extend", "--triple", &f, "--drop", "(2)", "--target", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&out)["extended"]["modulus"].is_array());

    let out = koehler(&["extend", "--triple", &f, "--drop", "[7,4,1]"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&out)["error"]["kind"], "internal");
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let args = ["theta", "--disc", "-3", "--modulus", "[13,5,1]", "--char", "1", "--bound", "40"];
    let direct = koehler(&args).stdout;
    let mut with_file = args.to_vec();
    let p = path.to_string_lossy().into_owned();
    with_file.extend(["--output", &p]);
    assert!(koehler(&with_file).status.success());
    assert_eq!(std::fs::read(&path).unwrap(), direct);
}
