use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn pbasis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbasis")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    pbasis(args).status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn record(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "record"]);
    let text = stdout(&pbasis(&all));
    serde_json::from_str(text.lines().last().expect("a record line")).expect("valid json")
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("pbasis-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

const X2Y: [&str; 6] = ["--prime", "3", "--vars", "x,y", "--f", "x^2*y"];

#[test]
fn analyze_exit_codes() {
    assert_eq!(code(&["analyze", "--prime", "2", "--vars", "x,y", "--f", "x", "--f", "y"]), 0);
    assert_eq!(code(&[&["analyze"][..], &X2Y].concat()), 1);
    assert_eq!(code(&["analyze", "--prime", "4", "--vars", "x", "--f", "x"]), 2);
    assert_eq!(code(&["analyze", "--prime", "3", "--vars", "x,y", "--f", "x^^2"]), 2);
    assert_eq!(code(&["analyze", "--prime", "3", "--vars", "x", "--f", "z"]), 2);
    assert_eq!(code(&["analyze"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
}

#[test]
fn witness_exit_codes() {
    let with = |extra: &[&str]| code(&[&["witness"][..], &X2Y, extra].concat());
    assert_eq!(with(&["--g", "x"]), 0);
    assert_eq!(with(&["--g", "x+1"]), 2);
    assert_eq!(with(&["--g", "x^2"]), 2);
    assert_eq!(with(&["--g", "x", "--budget", "1"]), 3);
}

#[test]
fn witness_record_is_one_based_and_verified() {
    let r = record(&["witness", "--prime", "2", "--vars", "x,y", "--f", "x", "--f", "x*y", "--g", "x"]);
    assert_eq!(r["outcome"], "found");
    assert_eq!(r["verified"], true);
    assert_eq!(r["witness"]["case"], "III");
    assert_eq!(r["witness"]["i"], 1);
    assert_eq!(r["witness"]["j"], 2);
}

#[test]
fn human_and_record_agree() {
    let human = stdout(&pbasis(&[&["analyze"][..], &X2Y].concat()));
    let r = record(&[&["analyze"][..], &X2Y].concat());
    assert!(human.contains(&format!("dgcd: {}", r["dgcd"].as_str().unwrap())));
    assert_eq!(r["dgcd"], "x");
    assert_eq!(r["p_basis"], false);
    assert!(human.contains("p-basis: no"));
    assert_eq!(r["minors"].as_array().unwrap().len(), 2);
}

#[test]
fn instance_file_options_and_flag_precedence() {
    let path = scratch("opts.txt", "p: 2\ncoeff: Fp[t]\nvars: x\nf1: (x^2 + t)*x\noption.seed: 9\noption.trials: 7\n");
    let p = path.to_str().unwrap();
    let r = record(&["analyze", "--instance", p]);
    assert_eq!(r["settings"]["seed"], 9);
    assert_eq!(r["settings"]["trials"], 7);
    assert_eq!(r["dgcd"], "x^2 + t");
    let r = record(&["analyze", "--instance", p, "--seed", "3"]);
    assert_eq!(r["settings"]["seed"], 3);
    let header = stdout(&pbasis(&["analyze", "--instance", p]));
    assert!(header.starts_with("# pbasis analyze | degree-bound 2 | budget 1000000 | trials 7 | seed 9"));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn decompose_reports_coefficients() {
    let base = ["decompose", "--prime", "2", "--vars", "x,y", "--f", "x+y^2"];
    let r = record(&[&base[..], &["--target", "x*y^2 + y^4"]].concat());
    assert_eq!(r["verdict"], "in_polynomial_span", "{r}");
    assert_eq!(r["coefficients"][0]["num"], "y^2");
    let r = record(&[&base[..], &["--target", "y^3"]].concat());
    assert_eq!(r["verdict"], "not_in_fraction_span", "{r}");
}

#[test]
fn verify_report_matches_stdout() {
    let path = std::env::temp_dir().join(format!("pbasis-cli-{}-report.jsonl", std::process::id()));
    let p = path.to_str().unwrap();
    let o = pbasis(&["verify", "--count", "4", "--sentinels", "--format", "record", "--report", p, "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&o));
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let summary = lines.last().unwrap();
    assert_eq!(summary["inconsistent"].as_array().unwrap().len(), 0);
    assert!(lines[..lines.len() - 1].iter().all(|l| l["verdict_consistent"] == true));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn verify_rejects_bad_parameters() {
    assert_eq!(code(&["verify", "--m", "3", "--n", "2"]), 2);
    assert_eq!(code(&["verify", "--deg", "40"]), 2);
    assert_eq!(code(&["verify", "--p", "6"]), 2);
}

#[test]
fn records_are_stable_across_runs() {
    let args = ["verify", "--count", "20", "--p", "3", "--seed", "11", "--format", "record"];
    assert_eq!(pbasis(&args).stdout, pbasis(&args).stdout);
}
