use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn zsdv(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_zsdv"));
    cmd.args(args).env_remove("ZSDV_MAX_ITER");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const EQUAL_COSTS: &str = r#"{"model": "oligopoly", "params": {"a": 10, "b": 0.5, "costs": [2, 2, 2]}}"#;
const SPREAD_COSTS: &str =
    r#"{"model": "oligopoly", "params": {"a": 10, "b": 0.5, "costs": [1, 2, 4]}, "checks": ["closed-forms"]}"#;

#[test]
fn equal_costs_pass_every_check() {
    let dir = TempDir::new().unwrap();
    let scenario = write(dir.path(), "s.json", EQUAL_COSTS);
    let out_dir = dir.path().join("out");
    let out = zsdv(&["run", "--scenario", &scenario, "--out", out_dir.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let report: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["passed"], true);
    let names: Vec<&str> = report["checks"].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(names, ["assumption1", "closed-forms", "equivalence", "lemma2", "lemma3"]);
    for check in report["checks"].as_object().unwrap().values() {
        assert_eq!(check["status"], "pass");
        assert!(!check["provenance"].as_str().unwrap().is_empty());
    }

    let regimes = report["checks"]["equivalence"]["details"]["regimes"].as_array().unwrap();
    assert_eq!(regimes.len(), 4);
    for r in regimes {
        assert_eq!(r["equivalent"], true);
        let p_b = r["nash_s"][1].as_f64().unwrap();
        assert!((p_b - 3.6).abs() < 1e-5, "{p_b}");
    }
    let summary = fs::read_to_string(out_dir.join("summary.txt")).unwrap();
    assert!(summary.contains("overall: PASS"));
}

#[test]
fn spread_costs_give_four_distinct_prices() {
    let dir = TempDir::new().unwrap();
    let scenario = write(dir.path(), "s.json", SPREAD_COSTS);
    let out = zsdv(&["run", "--scenario", &scenario], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let details = &report["checks"]["closed-forms"]["details"];
    let mut prices: Vec<f64> = details["cases"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["p_b_closed_form"].as_f64().unwrap())
        .collect();
    prices.sort_by(f64::total_cmp);
    assert!(prices.windows(2).all(|w| w[1] - w[0] > 1e-3), "{prices:?}");
    assert!(details["max_abs_error"].as_f64().unwrap() <= 1e-4);
}

#[test]
fn malformed_scenarios_name_the_field() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (r#"{"model": "oligopoly", "params": {"a": 10, "b": 0.5, "cost": [2, 2, 2]}}"#, "params.cost"),
        (r#"{"model": "oligopoly", "params": {"a": 10, "b": 2.0, "costs": [2, 2, 2]}}"#, "params.b"),
        (r#"{"model": "duopoly", "params": {"a": 10, "b": 0.5, "costs": [2, 2, 2]}}"#, "model"),
        (r#"{"model": "oligopoly", "params": {"a": 10, "b": 0.5, "costs": [2, 2, 2]}, "checks": ["lemma9"]}"#, "checks"),
    ];
    for (body, field) in cases {
        let scenario = write(dir.path(), "bad.json", body);
        let out = zsdv(&["run", "--scenario", &scenario], &[]);
        assert_eq!(out.status.code(), Some(2), "{body}");
        assert!(stderr(&out).contains(field), "{field}: {}", stderr(&out));
    }
    let scenario = write(dir.path(), "trunc.json", "{\"model\": ");
    assert_eq!(zsdv(&["run", "--scenario", &scenario], &[]).status.code(), Some(2));
}

#[test]
fn failing_checks_are_named() {
    let dir = TempDir::new().unwrap();
    let scenario = write(
        dir.path(),
        "s.json",
        r#"{"model": "oligopoly", "params": {"a": 10, "b": 0.5, "costs": [1, 2, 4]}, "checks": ["equivalence", "closed-forms"]}"#,
    );
    let out = zsdv(&["run", "--scenario", &scenario, "--format", "text"], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("equivalence"));
    assert!(!stderr(&out).contains("closed-forms"));
}

#[test]
fn iteration_cap_gives_convergence_exit() {
    let dir = TempDir::new().unwrap();
    let scenario = write(dir.path(), "s.json", EQUAL_COSTS);
    let out = zsdv(&["run", "--scenario", &scenario, "--check", "equivalence"], &[("ZSDV_MAX_ITER", "1")]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["checks"]["equivalence"]["status"], "error");
}

#[test]
fn reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let scenario = write(dir.path(), "s.json", EQUAL_COSTS);
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = zsdv(
            &["run", "--scenario", &scenario, "--exhaustive-regimes", "--out", out_dir.to_str().unwrap()],
            &[],
        );
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        fs::read(out_dir.join("report.json")).unwrap()
    };
    let first = run("a");
    assert_eq!(first, run("b"));
    let report: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(report["checks"]["equivalence"]["details"]["regimes"].as_array().unwrap().len(), 8);
}

#[test]
fn tol_flag_overrides_scenario() {
    let dir = TempDir::new().unwrap();
    let scenario = write(dir.path(), "s.json", SPREAD_COSTS);
    let out = zsdv(&["run", "--scenario", &scenario, "--tol", "1e-9"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["tolerances"]["solver"].as_f64(), Some(1e-9));
    let out = zsdv(&["run", "--scenario", &scenario, "--tol", "-1"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn list_checks_names_every_check() {
    let out = zsdv(&["list-checks"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["assumption1", "closed-forms", "equivalence", "lemma2", "lemma3"] {
        assert!(text.contains(name));
    }
}
