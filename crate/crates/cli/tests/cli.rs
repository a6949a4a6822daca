use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_persuade");

fn scenario(name: &str) -> String {
    format!("{}/scenarios/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(format!(
        "{}/tests/golden/{name}",
        env!("CARGO_MANIFEST_DIR")
    ))
    .unwrap()
}

fn persuade(args: &[&str], out: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .env("PERSUADE_OUT_DIR", out)
        .output()
        .unwrap()
}

fn report(args: &[&str], out: &Path) -> Value {
    let o = persuade(args, out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn value(r: &Value, name: &str) -> f64 {
    r["values"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["name"] == name)
        .unwrap_or_else(|| panic!("no value {name}"))["value"]
        .as_f64()
        .unwrap()
}

#[test]
fn solve_linear_bayesian_case() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(
        &[
            "solve",
            "--scenario",
            &scenario("judge_prosecutor_linear.json"),
            "--mode",
            "oneshot",
        ],
        dir.path(),
    );
    assert!((value(&r, "one_shot_value") - 0.6).abs() < 1e-9);
    assert_eq!(r["passed"], true);
    assert!(r.get("elapsed_seconds").is_none());
    for v in r["values"].as_array().unwrap() {
        assert!(v["module"].is_string() && v["tolerance"].is_number());
    }
}

#[test]
fn solve_twostep_indifferent_for_unit_prior_weight() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(
        &[
            "solve",
            "--scenario",
            &scenario("judge_prosecutor_grether.json"),
            "--mode",
            "twostep",
            "--csv",
        ],
        dir.path(),
    );
    assert_eq!(r["classification"], "indifferent");
    let csv = std::fs::read_to_string(dir.path().join("twostep_utility.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "q,interim_value,envelope,modified_utility"
    );
    assert_eq!(csv.lines().count(), 202);
}

#[test]
fn timing_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(
        &[
            "--timing",
            "solve",
            "--scenario",
            &scenario("judge_prosecutor_linear.json"),
            "--mode",
            "oneshot",
        ],
        dir.path(),
    );
    assert!(r["elapsed_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn malformed_prior_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenario("judge_prosecutor_linear.json"))
        .unwrap()
        .replace("[0.7, 0.3]", "[0.6, 0.3]");
    let path = dir.path().join("bad.json");
    std::fs::write(&path, text).unwrap();
    let o = persuade(
        &[
            "solve",
            "--scenario",
            path.to_str().unwrap(),
            "--mode",
            "oneshot",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("validation"));
}

#[test]
fn three_states_are_rejected_by_the_binary_solvers() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
      "environment": {
        "states": ["a", "b", "c"],
        "prior": [0.2, 0.3, 0.5],
        "actions": ["x", "y"],
        "receiver_utility": [[1, 0, 0], [0, 1, 1]],
        "sender_utility": [0, 1]
      },
      "rule": {"type": "geometric", "alpha": 1.5}
    }"#;
    let path = dir.path().join("three.json");
    std::fs::write(&path, text).unwrap();
    let o = persuade(
        &[
            "solve",
            "--scenario",
            path.to_str().unwrap(),
            "--mode",
            "oneshot",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("binary"));
}

#[test]
fn unknown_suite_and_bad_figure() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        persuade(&["verify", "--suite", "nope"], dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_ne!(
        persuade(&["figure", "--id", "6"], dir.path()).status.code(),
        Some(0)
    );
}

#[test]
fn verify_reports_deviations() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(
        &["verify", "--suite", "transform", "--seed", "4"],
        dir.path(),
    );
    let checks = r["oracle_deviations"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["passed"] == true));
    assert!(checks[0]["deviation"].as_f64().unwrap() < 1e-10);
    let r = report(&["verify", "--suite", "divisibility"], dir.path());
    assert_eq!(r["passed"], true);
}

#[test]
fn figure_one_header_carries_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    report(
        &["figure", "--id", "1", "--p", "0.3", "--alphas", "0.5,1,1.5"],
        dir.path(),
    );
    let csv = std::fs::read_to_string(dir.path().join("figure1.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header, golden("figure1_header.csv").trim_end());
    for t in ["0.700000", "0.500000", "0.433333"] {
        assert!(header.contains(t));
    }
    assert_eq!(csv.lines().count(), 202);
}

#[test]
fn figure_two_atoms() {
    let dir = tempfile::tempdir().unwrap();
    report(&["figure", "--id", "2"], dir.path());
    let csv = std::fs::read_to_string(dir.path().join("figure2.csv")).unwrap();
    assert_eq!(csv, golden("figure2.csv"));
    // ρ* = {(0, 4/7), (0.7, 3/7)}, ρ′ = {(0.15, 4/7), (0.5, 3/7)}
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            vec![f[2].parse().unwrap(), f[3].parse().unwrap()]
        })
        .collect();
    let want = [
        [0.0, 4.0 / 7.0],
        [0.7, 3.0 / 7.0],
        [0.15, 4.0 / 7.0],
        [0.5, 3.0 / 7.0],
    ];
    for (got, want) in rows.iter().zip(want) {
        assert!((got[0] - want[0]).abs() < 1e-9 && (got[1] - want[1]).abs() < 1e-9);
    }
}

#[test]
fn figure_three_series() {
    let dir = tempfile::tempdir().unwrap();
    report(&["figure", "--id", "3", "--points", "3"], dir.path());
    let csv = std::fs::read_to_string(dir.path().join("figure3.csv")).unwrap();
    assert_eq!(csv, golden("figure3_points3.csv"));
}

#[test]
fn figure_five_markers() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(&["figure", "--id", "5"], dir.path());
    let csv = std::fs::read_to_string(dir.path().join("figure5.csv")).unwrap();
    assert_eq!(csv, golden("figure5.csv"));
    assert!((value(&r, "one_shot_value[alpha=0.5]") - 3.0 / 7.0).abs() < 1e-9);
    assert!((value(&r, "one_shot_value[alpha=1.5]") - 9.0 / 13.0).abs() < 1e-9);
}

#[test]
fn sweep_rows_and_signs() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(
        &[
            "sweep", "--alphas", "0.5,1,2", "--betas", "0.5,1,2", "--ps", "0.3",
        ],
        dir.path(),
    );
    assert_eq!(value(&r, "rows"), 9.0);
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        golden("sweep_header.csv").trim_end()
    );
    let signs: String = csv
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            [&f[0..3], &f[11..17]].concat().join(",") + "\n"
        })
        .collect();
    assert_eq!(signs, golden("sweep_signs.csv"));
}

#[test]
fn sweep_empty_range_and_trivial_branch() {
    let dir = tempfile::tempdir().unwrap();
    report(
        &[
            "sweep",
            "--alphas",
            "1:0:0.5",
            "--ps",
            "0.3",
            "--name",
            "empty.csv",
        ],
        dir.path(),
    );
    let csv = std::fs::read_to_string(dir.path().join("empty.csv")).unwrap();
    assert_eq!(csv, golden("sweep_header.csv"));

    let r = report(
        &[
            "sweep",
            "--alphas",
            "2",
            "--ps",
            "0.3,0.6",
            "--family",
            "base-rate",
        ],
        dir.path(),
    );
    assert_eq!(value(&r, "trivial_rows"), 1.0);
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    assert!(last.starts_with("2.000000000,1.000000000,0.600000000"));
    assert!(last.contains("trivial branch, both values 1"));

    let r = report(
        &["sweep", "--alphas=-1", "--ps", "0.3", "--name", "bad.csv"],
        dir.path(),
    );
    assert_eq!(value(&r, "skipped_rows"), 1.0);
}

#[test]
fn simulate_matches_solution() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(
        &[
            "simulate",
            "--scenario",
            &scenario("judge_prosecutor_linear.json"),
            "--reps",
            "200000",
            "--seed",
            "3",
        ],
        dir.path(),
    );
    assert_eq!(r["passed"], true);
    assert!((value(&r, "analytic_value") - 0.6).abs() < 1e-12);
    assert_eq!(r["details"]["replications"], 200000);
}

#[test]
fn out_dir_flag_overrides_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    report(
        &[
            "figure",
            "--id",
            "2",
            "--out-dir",
            flag_dir.path().to_str().unwrap(),
        ],
        env_dir.path(),
    );
    assert!(flag_dir.path().join("figure2.csv").exists());
    assert!(!env_dir.path().join("figure2.csv").exists());
}

#[test]
fn schema_lists_the_scenario_fields() {
    let schema: Value = serde_json::from_str(
        &std::fs::read_to_string(format!(
            "{}/docs/scenario.schema.json",
            env!("CARGO_MANIFEST_DIR")
        ))
        .unwrap(),
    )
    .unwrap();
    let props = schema["properties"].as_object().unwrap();
    let mut keys: Vec<&str> = props.keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(
        keys,
        ["environment", "rule", "simulation", "solver", "strategy"]
    );
    let solver: Vec<&String> = props["solver"]["properties"]
        .as_object()
        .unwrap()
        .keys()
        .collect();
    let defaults = serde_json::to_value(persuade_core::SolverOptions::default()).unwrap();
    let mut want: Vec<&String> = defaults.as_object().unwrap().keys().collect();
    let mut got = solver.clone();
    got.sort();
    want.sort();
    assert_eq!(got, want);
}
