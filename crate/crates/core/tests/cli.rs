use std::process::{Command, Output};

use weightcheck::pairing::RangeReport;
use weightcheck::report::{to_json, AhReport, Dossier};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weightcheck"))
        .args(args)
        .env_remove("WEIGHTCHECK_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn inspect_worked_instance() {
    let o = run(&["inspect", "--p", "3", "--f", "2", "--r", "1,1", "--J", "1", "--d", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("xi           (2, 6)"), "{s}");
    assert!(s.contains("u0: (0, 2)") && s.contains("u1: (0, 10)"), "{s}");
    assert!(s.contains("mu(J)        {0}"), "{s}");
}

#[test]
fn inspect_json_round_trips() {
    let o = run(&["inspect", "--p", "3", "--f", "1", "--r", "2", "--J", "0", "--d", "2", "--seed", "11", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let parsed: Dossier = serde_json::from_str(&text).unwrap();
    assert_eq!(to_json(&parsed), text);
    assert_eq!(parsed.pairing.chi, "trivial");
    assert!(parsed.replay.terms.iter().any(|&(_, e)| e == 0));
}

#[test]
fn inspect_config_errors() {
    let o = run(&["inspect", "--p", "3", "--f", "1", "--r", "3", "--J", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("excluded cyclotomic J=S case"));
    let o = run(&["inspect", "--p", "3", "--f", "2", "--r", "1,3", "--J", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("maximality"));
    let o = run(&["inspect", "--p", "3", "--f", "1", "--r", "1", "--d", "2", "--a", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["inspect", "--p", "3", "--f", "1", "--r", "1", "--d", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["inspect", "--p", "11", "--f", "1", "--r", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--allow-large"));
    let o = run(&["inspect", "--p", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let o = run(&["verify", "--p", "3", "--f-max", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["verify", "--p", "2,3", "--f-max", "2", "--d", "1,2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    // the first f = 3 counterexamples to orthogonality
    let o = run(&["verify", "--p", "3", "--f-max", "3", "--d", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL p=3 f=3 r=(1,1,1) J={0,1}"));
}

#[test]
fn verify_json_is_deterministic_and_round_trips() {
    let args = |w: &'static str| ["verify", "--p", "2,3", "--f-max", "2", "--d", "1,2,3", "--twists", "all", "--workers", w, "--format", "json"];
    let one = run(&args("1"));
    let eight = run(&args("8"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, eight.stdout);
    let text = stdout(&one);
    let parsed: RangeReport = serde_json::from_str(&text).unwrap();
    assert_eq!(to_json(&parsed), text);
    assert_eq!(parsed.summary.skipped_degrees, vec![(2, 2), (3, 3)]);
}

#[test]
fn verify_csv_has_a_row_per_check() {
    let o = run(&["verify", "--p", "2", "--f-max", "1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut rows = csv::Reader::from_reader(s.as_bytes());
    let n = rows.records().count();
    // one instance for p = 2, f = 1
    assert_eq!(n, s.lines().count() - 1);
    assert!(n > 10);
}

#[test]
fn output_directory_from_environment() {
    let dir = std::env::temp_dir().join(format!("weightcheck-cli-{}", std::process::id()));
    let o = Command::new(env!("CARGO_BIN_EXE_weightcheck"))
        .args(["ah-check", "--p", "3", "--n", "1", "--trunc", "10", "--format", "json", "--output", "ah.json"])
        .env("WEIGHTCHECK_OUTPUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.join("ah.json")).unwrap();
    let parsed: AhReport = serde_json::from_str(&text).unwrap();
    assert!(parsed.passed());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn ah_check_examples() {
    assert_eq!(run(&["ah-check", "--p", "2", "--n", "1", "--trunc", "8"]).status.code(), Some(0));
    assert_eq!(run(&["ah-check", "--p", "3", "--n", "2", "--trunc", "30"]).status.code(), Some(0));
    assert_eq!(run(&["ah-check", "--trunc", "1"]).status.code(), Some(0));
    let o = run(&["ah-check", "--p", "2", "--trunc", "6", "--show"]);
    assert!(stdout(&o).contains("c_3 = 2/3"));
    assert_eq!(run(&["ah-check", "--p", "4"]).status.code(), Some(2));
}

#[test]
fn enumerate_lists_instances() {
    let o = run(&["enumerate", "--p", "3", "--f", "1", "--d", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("4 instances\n"));
    let o = run(&["enumerate", "--p", "3", "--f", "1", "--d", "1,3"]);
    assert!(stdout(&o).contains("skipped d = 3"));
}
