use std::collections::BTreeMap;
use std::path::Path;

use ndperc_core::harness::{compare, read_records, run_sweep, ExperimentConfig};
use ndperc_core::Error;

fn config(pairs: &[(&str, &str)]) -> ExperimentConfig {
    let map: BTreeMap<String, String> = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    ExperimentConfig::from_map(map).unwrap()
}

fn small_sweep(out: &Path, workers: &str) -> ExperimentConfig {
    config(&[
        ("n", "3000"),
        ("d", "10"),
        ("seed", "11"),
        ("trials", "10"),
        ("checkers", "mixing,stream,expansion_window"),
        ("spectrum_tol", "1e-6"),
        ("workers", workers),
        ("out", out.to_str().unwrap()),
    ])
}

#[test]
fn complete_graph_fully_retained() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k4.jsonl");
    let cfg = config(&[
        ("family", "clique_union"),
        ("n", "4"),
        ("d", "3"),
        ("p", "1"),
        ("seed", "0"),
        ("trials", "3"),
        ("checkers", "none"),
        ("out", out.to_str().unwrap()),
    ]);
    let outcome = run_sweep(&cfg).unwrap();
    let records = read_records(&out).unwrap();
    assert_eq!(records.trials.len(), 3);
    for t in &records.trials {
        assert_eq!(t.census.l1, 4);
        assert_eq!(t.census.edges_total, 6);
        assert_eq!(t.census.e_l1, 6);
        assert_eq!(t.census.components, 1);
        assert!(t.oracle_agrees && t.conserved);
        assert_eq!(t.census.longest_cycle_lb, 4);
    }
    assert_eq!(outcome.summary.metrics["zp"].median, 6.0);
}

#[test]
fn output_is_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.jsonl");
    let eight = dir.path().join("eight.jsonl");
    run_sweep(&small_sweep(&one, "1")).unwrap();
    run_sweep(&small_sweep(&eight, "8")).unwrap();
    assert_eq!(std::fs::read(&one).unwrap(), std::fs::read(&eight).unwrap());
    assert_eq!(
        std::fs::read(one.with_extension("csv")).unwrap(),
        std::fs::read(eight.with_extension("csv")).unwrap()
    );
}

#[test]
fn resume_keeps_completed_trials() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.jsonl");
    run_sweep(&small_sweep(&full, "1")).unwrap();
    let text = std::fs::read_to_string(&full).unwrap();

    // header plus four trials and half of the fifth, as after a crash
    let lines: Vec<&str> = text.lines().collect();
    let mut partial = lines[..5].join("\n");
    partial.push('\n');
    partial.push_str(&lines[5][..lines[5].len() / 2]);
    let resumed = dir.path().join("resumed.jsonl");
    std::fs::write(&resumed, partial).unwrap();
    assert!(matches!(read_records(&resumed), Err(Error::Incomplete { .. })));
    assert!(compare(&resumed).is_err());

    let mut cfg = small_sweep(&resumed, "1");
    cfg.resume = true;
    let outcome = run_sweep(&cfg).unwrap();
    assert_eq!(outcome.resumed_trials, 4);
    assert_eq!(std::fs::read_to_string(&resumed).unwrap(), text);
}

#[test]
fn resume_refuses_a_different_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.jsonl");
    run_sweep(&small_sweep(&out, "1")).unwrap();
    let mut cfg = config(&[
        ("n", "3000"),
        ("d", "10"),
        ("seed", "12"),
        ("trials", "10"),
        ("out", out.to_str().unwrap()),
    ]);
    cfg.resume = true;
    assert!(matches!(run_sweep(&cfg), Err(Error::Config(_))));
}

#[test]
fn compare_reproduces_the_sweep_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.jsonl");
    let outcome = run_sweep(&small_sweep(&out, "2")).unwrap();
    assert_eq!(compare(&out).unwrap(), outcome.summary);
    let records = read_records(&out).unwrap();
    assert!(records.trials.iter().all(|t| t.oracle_agrees && t.conserved));
    assert!(records.trials.iter().all(|t| t.checks.len() == 3));
}
