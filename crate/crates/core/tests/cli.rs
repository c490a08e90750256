use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_margulis")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn ratio(v: &Value) -> (i64, i64) {
    let s = v.as_str().expect("rational is a string");
    match s.split_once('/') {
        Some((p, q)) => (p.parse().unwrap(), q.parse().unwrap()),
        None => (s.parse().unwrap(), 1),
    }
}

#[test]
fn weights_report_schema() {
    let out = run(&["weights", "--system", "C4", "--highest", "1,1,1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["system"], "C4");
    assert_eq!(v["count"], 41);
    let ws = v["weights"].as_array().unwrap();
    assert_eq!(ws.len(), 41);
    for w in ws {
        let w = w.as_array().unwrap();
        assert_eq!(w.len(), 4);
        w.iter().for_each(|c| {
            ratio(c);
        });
    }
    assert!(ws.iter().any(|w| w.as_array().unwrap().iter().all(|c| c == "0")));
}

#[test]
fn basis_selection() {
    // A1 has rank 1 in a 2-dimensional ambient space, so one entry means fundamental coordinates.
    let auto = json(&run(&["weights", "--system", "A1", "--highest", "2"]));
    let fund = json(&run(&["weights", "--system", "A1", "--highest", "2", "--basis", "fund"]));
    let amb = json(&run(&["weights", "--system", "A1", "--highest", "1,-1", "--basis", "ambient"]));
    assert_eq!(auto, fund);
    assert_eq!(auto, amb);
    assert_eq!(auto["count"], 3);

    let half = json(&run(&["weights", "--system", "A1", "--highest", "1", "--basis", "fund"]));
    let hw: Vec<(i64, i64)> = half["highest"].as_array().unwrap().iter().map(ratio).collect();
    assert_eq!(hw, vec![(1, 2), (-1, 2)]);

    let bad = run(&["weights", "--system", "A2", "--highest", "1,0", "--basis", "ambient"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn generic_types_of_c4() {
    let out = run(&["types", "--system", "C4", "--highest", "1,1,1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["count"], 3);
    assert_eq!(v["classes"].as_array().unwrap().len(), 3);
}

#[test]
fn check_rep_exit_codes() {
    let ok = run(&["check-rep", "--system", "A2", "--highest", "1,0,-1"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["numeric_realization"], false);

    let no_zero_weight = run(&["check-rep", "--system", "A2", "--highest", "1,0"]);
    assert_eq!(no_zero_weight.status.code(), Some(2));
    assert_eq!(json(&no_zero_weight)["zero_weight"]["status"], "FAILED");

    let even = run(&["check-rep", "--system", "B2", "--highest", "1,0", "--group", "so(3,2)"]);
    assert_eq!(even.status.code(), Some(2));
    let v = json(&even);
    assert_eq!(v["numeric_realization"], true);
    assert_eq!(v["cond_ib_w0_moves"]["status"], "FAILED");
}

#[test]
fn errors_exit_one() {
    let unknown = run(&["weights", "--system", "Z9", "--highest", "1"]);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(json(&unknown)["error"].as_str().unwrap().contains("Z9"));

    assert_eq!(run(&["--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--suite", "nonsense"]).status.code(), Some(1));
}

#[test]
fn out_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("margulis-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("w.json");
    let args = ["weights", "--system", "G2", "--highest", "1,0", "--basis", "fund"];
    let direct = run(&args);
    let mut with_out: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    assert_eq!(run(&with_out).status.code(), Some(0));
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, direct.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_suite_report_round_trips() {
    let out = run(&["verify", "--suite", "weights", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["seed"], 7);
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
}
