//! End-to-end tests driving the compiled `galtor` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn galtor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_galtor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_scenario(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).expect("scenario written");
    path
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn field_value(stdout: &str, key: &str) -> f64 {
    stdout
        .lines()
        .find_map(|line| line.strip_prefix(key).map(str::trim))
        .unwrap_or_else(|| panic!("missing {key} line in:\n{stdout}"))
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

const REST_TORSOR: &str = r#"{
  "kind": "torsor_transform",
  "torsor": { "m": 1.0, "l": [0.0, 0.0, 4.0] }
}"#;

const PARABOLA: &str = r#"{
  "kind": "particle",
  "connection": { "kind": "uniform", "g": [0.0, 0.0, -9.81] },
  "initial": { "m": 1.5, "r0": [1.0, -2.0, 0.5], "v0": [2.0, 1.0, 5.0], "l0": [1.0, 2.0, 3.0] },
  "integrator": { "dt": 0.001, "steps": 200 }
}"#;

#[test]
fn invariants_reports_the_rest_torsor() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "rest.json", REST_TORSOR);
    let out = galtor(&["invariants", "--scenario", scenario.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {:?}", out.stderr);
    let stdout = stdout_of(&out);
    assert!((field_value(&stdout, "l0_norm") - 4.0).abs() < 1e-15);
    assert!((field_value(&stdout, "m ") - 1.0).abs() < 1e-15);
    assert!(stdout.contains("isotropy_dimension 2"));
}

#[test]
fn transform_torsor_with_identity_echoes_the_torsor() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "rest.json", REST_TORSOR);
    let out = galtor(&["transform-torsor", "--scenario", scenario.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = stdout_of(&out);
    assert!(stdout.contains(
        r#"component_law {"m":1.0,"p":[0.0,0.0,0.0],"q":[0.0,0.0,0.0],"l":[0.0,0.0,4.0]}"#
    ));
    assert!(stdout.contains("matrix_law"));
    assert_eq!(field_value(&stdout, "max_discrepancy"), 0.0);
}

#[test]
fn particle_runs_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "parabola.json", PARABOLA);
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let run = galtor(&[
            "simulate-particle",
            "--scenario",
            scenario.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(run.status.code(), Some(0), "stderr: {:?}", run.stderr);
    }
    let csv_a = fs::read(out_a.join("trajectory.csv")).unwrap();
    let csv_b = fs::read(out_b.join("trajectory.csv")).unwrap();
    assert!(!csv_a.is_empty());
    assert_eq!(csv_a, csv_b);
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(out_a.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["termination"]["kind"], "completed");
    assert_eq!(report["conservation"]["samples"], 201);
}

#[test]
fn integrator_overrides_change_the_sample_count() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "parabola.json", PARABOLA);
    let run = galtor(&[
        "simulate-particle",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--steps",
        "10",
        "--dt",
        "0.01",
    ]);
    assert_eq!(run.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 12, "header plus 11 samples");
}

#[test]
fn rigidbody_run_writes_trajectory_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "top.json",
        r#"{
          "kind": "rigidbody",
          "inertia_diag": [1.0, 1.0, 2.0],
          "initial": { "omega_body": [1.0, 0.0, 1.0] },
          "integrator": { "dt": 0.001, "steps": 1000 }
        }"#,
    );
    let run = galtor(&[
        "simulate-rigidbody",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0), "stderr: {:?}", run.stderr);
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,qw,qx,qy,qz,wx,wy,wz\n"));
    assert_eq!(csv.lines().count(), 1002);
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert!(report["spin_drift"].as_f64().unwrap() < 1e-8);
    assert!(report["max_orthogonality_error"].as_f64().unwrap() < 1e-10);
}

#[test]
fn covariance_check_reports_a_small_discrepancy() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "covariance.json",
        r#"{
          "kind": "covariance",
          "connection": { "kind": "uniform", "g": [0.0, 0.0, -9.81] },
          "initial": { "m": 1.2, "r0": [1.0, 0.5, 0.3], "v0": [0.3, -0.2, 0.4], "l0": [0.2, -0.1, 0.3] },
          "frame": { "type": "uniform_rotation", "omega": [0.0, 0.0, 0.5], "origin": [0.25, -0.5, 0.0] },
          "integrator": { "dt": 0.001, "steps": 500 }
        }"#,
    );
    let out = galtor(&["check-covariance", "--scenario", scenario.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {:?}", out.stderr);
    let stdout = stdout_of(&out);
    assert!(field_value(&stdout, "max_discrepancy") < 1e-6);
    assert!(field_value(&stdout, "samples") as usize == 501);
}

#[test]
fn self_test_passes_and_prints_check_lines() {
    let out = galtor(&["self-test", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {:?}", out.stderr);
    let stdout = stdout_of(&out);
    assert!(stdout.contains("check 01 PASS"));
    assert!(stdout.contains("self checks passed"));
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn malformed_scenario_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "bad.json",
        r#"{
          "kind": "particle",
          "connection": { "kind": "uniform", "g": [0.0, 0.0, -1.0] },
          "initial": { "m": 1.0, "r0": [0,0,0], "v0": [0,0,0], "bogus": 3 },
          "integrator": { "dt": 0.001, "steps": 10 }
        }"#,
    );
    let out = galtor(&[
        "simulate-particle",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("bogus"), "stderr: {stderr}");
}

#[test]
fn scenario_kind_mismatch_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "rest.json", REST_TORSOR);
    let out = galtor(&[
        "simulate-particle",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn singular_newtonian_start_exits_numerically_with_truncated_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "singular.json",
        r#"{
          "kind": "particle",
          "connection": { "kind": "newtonian", "sources": [{ "mass": 1.0, "position": [0.0, 0.0, 0.0] }] },
          "initial": { "m": 1.0, "r0": [0.0, 0.0, 0.0], "v0": [0.0, 0.0, 0.0] },
          "integrator": { "dt": 0.001, "steps": 10 }
        }"#,
    );
    let out = galtor(&[
        "simulate-particle",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2, "header plus the initial sample");
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["termination"]["kind"], "singularity_at");
    assert!(report["conservation"]["energy_drift"].is_null());
}
