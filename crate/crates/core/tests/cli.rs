use std::process::Command;

use ball_asymptotics::cli::tables::{recheck, CellRow};
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_ball-asymptotics");

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn table_output_is_deterministic() {
    let (c1, a) = run(&["table", "2", "--prec", "128"]);
    let (c2, b) = run(&["table", "2", "--prec", "128"]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert_eq!(a.lines().next(), Some("row_key,col_key,computed,paper,rel_dev,pass"));
    assert_eq!(a.lines().count(), 19);
}

#[test]
fn json_round_trip_reproduces_pass_flags() {
    let dir = std::env::temp_dir().join(format!("ball-asym-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("t4.json");
    let (code, stdout) = run(&[
        "table",
        "4",
        "--prec",
        "128",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["config"]["table"], 4);
    let tol = doc["config"]["tolerance"].as_f64().unwrap();
    let rows: Vec<CellRow> = serde_json::from_value(doc["rows"].clone()).unwrap();
    assert_eq!(rows.len(), 15);
    for row in &rows {
        assert_eq!(recheck(4, row, tol), row.pass, "{row:?}");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn tight_tolerance_reports_mismatch() {
    let (code, out) = run(&["table", "4", "--prec", "128", "--tolerance", "1e-6"]);
    assert_eq!(code, 1);
    assert!(out.lines().skip(1).any(|l| l.ends_with(",false")));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["table", "9"]).0, 2);
    assert_eq!(run(&["expand", "--kind", "K", "--nu", "1/2", "--n", "100"]).0, 2);
    assert_eq!(run(&["integrate", "--kind", "Ihat", "--nu", "x", "--n", "10"]).0, 2);
    assert_eq!(run(&["bogus"]).0, 2);
}

#[test]
fn expand_compare_matches_table_one_cell() {
    let (code, out) = run(&[
        "expand",
        "--kind",
        "I",
        "--nu",
        "3/4",
        "--n",
        "100",
        "--K",
        "1",
        "--compare",
        "--prec",
        "128",
    ]);
    assert_eq!(code, 0);
    let last = out.lines().last().unwrap();
    let rel: f64 = last.rsplit(',').next().unwrap().parse().unwrap();
    assert!((rel / 2.468e-5 - 1.0).abs() < 5e-3, "{last}");
}

#[test]
fn integrate_ihat() {
    let (code, out) = run(&[
        "integrate",
        "--kind",
        "Ihat",
        "--nu",
        "0",
        "--n",
        "10,40",
        "--prec",
        "96",
        "--digits",
        "20",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 3);
}
