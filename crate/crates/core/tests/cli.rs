use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dynphase::harness;

fn dynphase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynphase"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(rel)
        .display()
        .to_string()
}

#[test]
fn solve_sat_prints_a_verifiable_model() {
    let path = data("uf50-218/uf50-001.cnf");
    let out = dynphase(&["solve", &path]);
    assert_eq!(out.status.code(), Some(10));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("s SATISFIABLE\n"));
    let values: Vec<i64> = stdout
        .lines()
        .filter_map(|l| l.strip_prefix('v'))
        .flat_map(|l| l.split_whitespace().map(|t| t.parse::<i64>().unwrap()))
        .collect();
    assert_eq!(values.last(), Some(&0));
    let model: Vec<bool> = values[..values.len() - 1].iter().map(|&v| v > 0).collect();
    let formula = harness::read_formula(Path::new(&path)).unwrap();
    assert_eq!(model.len(), formula.num_vars());
    assert!(formula.is_satisfied_by(&model));
}

#[test]
fn solve_unsat_exit_code_and_stats() {
    let out = dynphase(&["solve", &data("uuf50-218/uuf50-001.cnf"), "--stats"]);
    assert_eq!(out.status.code(), Some(20));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("c conflicts"));
    assert!(stdout.trim_end().ends_with("s UNSATISFIABLE"));
}

#[test]
fn conflict_budget_gives_unknown() {
    let path = data("uuf50-218/uuf50-002.cnf");
    let out = dynphase(&["solve", &path, "--conflict-budget", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("s UNKNOWN"));
}

#[test]
fn every_scheme_name_is_accepted() {
    let path = data("uf50-218/uf50-002.cnf");
    for scheme in ["f-save", "t-save", "F+All_save", "odd-even", "bit-encode", "full-dynamic", "half-dynamic"] {
        let out = dynphase(&["solve", &path, "--phase-scheduler", "fixed", "--phase-scheme", scheme]);
        assert_eq!(out.status.code(), Some(10), "{scheme}");
    }
    for scheduler in ["glucose", "lingeling"] {
        let out = dynphase(&["solve", &path, "--phase-scheduler", scheduler, "--threshold-scale", "1e-4"]);
        assert_eq!(out.status.code(), Some(10), "{scheduler}");
    }
}

#[test]
fn bad_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cnf");
    fs::write(&path, "p cnf 2 1\n1 3 0\n").unwrap();
    let out = dynphase(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    let out = dynphase(&["solve", "/nonexistent/x.cnf"]);
    assert_eq!(out.status.code(), Some(1));
    let out = dynphase(&["solve", &data("uf50-218/uf50-001.cnf"), "--oddeven-origin", "2"]);
    assert_eq!(out.status.code(), Some(2), "clap rejects out-of-range values");
}

#[test]
fn suite_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv_a = dir.path().join("a.csv");
    let csv_b = dir.path().join("b.csv");
    let suite = data("uuf50-218");
    let out = dynphase(&["suite", &suite, "--csv", csv_a.to_str().unwrap(), "--jobs", "2"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().contains("solved=100/100"));
    let out = dynphase(&[
        "suite", &suite, "--csv", csv_b.to_str().unwrap(),
        "--phase-scheduler", "fixed", "--phase-scheme", "full-dynamic",
    ]);
    assert!(out.status.success());

    let text = fs::read_to_string(&csv_a).unwrap();
    assert!(text.starts_with(&harness::CSV_COLUMNS.join(",")));
    assert!(text.lines().last().unwrap().starts_with("# solved=100/100"));
    let records = harness::read_csv(fs::File::open(&csv_a).unwrap()).unwrap();
    assert_eq!(records.len(), 100);
    assert!(records.iter().all(|r| r.status == harness::RunStatus::Unsat));

    let out = dynphase(&["summary", csv_a.to_str().unwrap(), csv_b.to_str().unwrap()]);
    assert!(out.status.success());
    let table = String::from_utf8(out.stdout).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert_eq!(table.matches("100/100").count(), 2);
}

#[test]
fn fuzz_subcommand_reports_no_mismatch() {
    let out = dynphase(&["fuzz", "--count", "50", "--all-schemes", "--threshold-scale", "1e-4"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("50 instances"), "{stdout}");
    assert!(stdout.contains("450 solver runs, 0 mismatches"), "{stdout}");
}
