use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stable-constraints"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_prints_three_solutions() {
    let file = data("example1.txt");
    let o = run(&["solve", file.to_str().unwrap(), "--mode", "all"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(
        lines,
        [
            "(w1,f2) (w2,f1) (w3,f3) (w4,f4) (w5,f4)",
            "(w1,f2) (w2,f1) (w3,f4) (w4,f3) (w5,f4)",
            "(w1,f2) (w2,f4) (w3,f1) (w4,f3) (w5,f4)",
        ]
    );
}

#[test]
fn text_and_json_agree() {
    let file = data("example1.txt");
    let text = stdout(&run(&["solve", file.to_str().unwrap()]));
    let json = stdout(&run(&["solve", file.to_str().unwrap(), "--format", "json"]));
    let records: Vec<Value> = json.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let from_json: BTreeSet<String> = records
        .iter()
        .filter(|r| r["type"] == "solution")
        .map(|r| {
            r["assignment"]
                .as_array()
                .unwrap()
                .iter()
                .map(|p| format!("({},{})", p[0].as_str().unwrap(), p[1].as_str().unwrap()))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    let from_text: BTreeSet<String> = text.lines().map(str::to_string).collect();
    assert_eq!(from_json, from_text);
    let summary = records.last().unwrap();
    assert_eq!(summary["type"], "summary");
    assert_eq!(summary["solutions"], 3);
    assert_eq!(records[0]["positions"][3][1], "f4#2");
}

#[test]
fn forced_unemployable_worker_is_infeasible() {
    let file = data("example1_w6_forced.txt");
    let o = run(&["solve", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).is_empty());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("w6") && err.contains("never employed"), "{err}");
}

#[test]
fn garbage_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("garbage.txt");
    std::fs::write(&path, "this is not a market\n").unwrap();
    assert_eq!(run(&["validate", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["solve", "/nonexistent/market.txt"]).status.code(), Some(2));
    assert_eq!(run(&["gen-appendix-d", "--n", "7"]).status.code(), Some(2));
}

#[test]
fn validate_and_normal_form() {
    let file = data("example1.txt");
    let o = run(&["validate", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("6 workers, 4 firms, 5 positions"));

    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("nf.dot");
    let o = run(&["normal-form", file.to_str().unwrap(), "--dot", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("r = 5"));
    assert!(out.contains("never employed: w6"));
    assert!(out.contains("in every stable matching: (w5,f4#1)"));
    let dot = std::fs::read_to_string(dot).unwrap();
    assert!(dot.starts_with("digraph") && dot.contains("(w5,f4#1)"));
}

#[test]
fn generated_family_round_trips_through_solve_and_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d12.txt");
    let gen = run(&["gen-appendix-d", "--n", "12", "--forbid-diagonal-from", "5"]);
    assert_eq!(gen.status.code(), Some(0));
    std::fs::write(&path, &gen.stdout).unwrap();
    let p = path.to_str().unwrap();
    let solved: BTreeSet<String> = stdout(&run(&["solve", p])).lines().map(str::to_string).collect();
    let oracle: BTreeSet<String> = stdout(&run(&["oracle", p])).lines().map(str::to_string).collect();
    assert_eq!(solved.len(), 4);
    assert_eq!(solved, oracle);

    let limited = run(&["solve", p, "--limit", "2"]);
    assert_eq!(stdout(&limited).lines().count(), 2);
    assert!(String::from_utf8_lossy(&limited.stderr).contains("limit reached"));
    let refused = run(&["oracle", p, "--max-candidates", "10"]);
    assert_eq!(refused.status.code(), Some(2));
}

#[test]
fn optimal_modes_print_one_line() {
    let file = data("example1.txt");
    let w = stdout(&run(&["solve", file.to_str().unwrap(), "--mode", "worker-opt"]));
    let f = stdout(&run(&["solve", file.to_str().unwrap(), "--mode", "firm-opt"]));
    assert_eq!(w.trim(), "(w1,f2) (w2,f1) (w3,f3) (w4,f4) (w5,f4)");
    assert_eq!(f.trim(), "(w1,f2) (w2,f4) (w3,f1) (w4,f3) (w5,f4)");
    let par = stdout(&run(&["solve", file.to_str().unwrap(), "--parallel"]));
    assert_eq!(par.lines().count(), 3);
}

#[test]
fn cyclic_regression_file() {
    let file = data("cyclic_three.txt");
    let out = stdout(&run(&["solve", file.to_str().unwrap()]));
    assert!(!out.contains("(w1,f2) (w2,f1) (w3,f3)"));
    assert_eq!(out.lines().count(), 2);
}
