use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bjj-lgi"));
    cmd.env_remove("BJJ_LGI_WORKERS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn table(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|x| if x == "true" { 1.0 } else if x == "false" { 0.0 } else { x.parse().unwrap_or(f64::NAN) }).collect())
        .collect();
    (header, rows)
}

fn read_table(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    table(&std::fs::read_to_string(path).unwrap())
}

fn sidecar(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("run.json")).unwrap()).unwrap()
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name} in {header:?}"))
}

#[test]
fn single_boson_imbalance_is_cosine() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&["evolve", "--n", "1", "--lambda", "0", "--tmax", "3", "--tsteps", "300", "--out", out]);
    let (header, rows) = read_table(&dir.path().join("imbalance.csv"));
    assert_eq!(header, ["t_over_2pi", "z"]);
    assert_eq!(rows.len(), 301);
    for r in &rows {
        assert!((r[1] - (2.0 * PI * r[0]).cos()).abs() < 1e-10);
    }
}

#[test]
fn strong_repulsion_stays_trapped() {
    let out = ok(&["evolve", "--n", "2000", "--lambda", "2.5", "--init-left", "2000", "--tmax", "2", "--tsteps", "400"]);
    let (header, rows) = table(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(header.len(), 2002);
    assert_eq!(rows.len(), 401);
    for r in &rows {
        let probs = &r[1..];
        let argmax = (0..probs.len()).fold(0, |b, k| if probs[k] > probs[b] { k } else { b });
        assert!(argmax > 1000, "t = {}: argmax {argmax}", r[0]);
    }
}

#[test]
fn empty_grids_are_usage_errors() {
    for args in [
        &["evolve", "--n", "4", "--tmax", "1", "--tsteps", "0"][..],
        &["lg-scan", "--n", "4", "--tau-max", "1", "--tau-steps", "0"],
        &["lg-scan", "--n", "4", "--tau-max", "1", "--tau-steps", "5", "--lambda-min", "1", "--lambda-max", "1", "--lambda-steps", "3"],
        &["evolve", "--n", "0", "--tmax", "1", "--tsteps", "2"],
        &["evolve", "--n", "4", "--init-left", "5", "--tmax", "1", "--tsteps", "2"],
        &["lg-scan", "--n", "4", "--tau-steps", "5"],
        &["rabi", "--bogus"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = run(&["evolve", "--n", "2", "--tmax", "1", "--tsteps", "2", "--out", blocker.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let out = run(&["evolve", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn lambda_scan_violations_stay_inside_the_boundary() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&[
        "lg-scan", "--n", "100", "--lambda-min", "-3", "--lambda-max", "3", "--lambda-steps", "30", "--tau-max", "1",
        "--tau-steps", "200", "--out", out,
    ]);
    let side = sidecar(dir.path());
    let region: Vec<f64> = side["violation_region"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(!region.is_empty());
    assert!(region.iter().all(|&l| l > -2.0 && l < 2.0), "{region:?}");
    assert!(region.contains(&0.0));
    let (header, rows) = read_table(&dir.path().join("lg_scan.csv"));
    assert_eq!(header, ["tau_over_2pi", "lambda", "C12", "C23", "C13", "LG"]);
    assert_eq!(rows.len(), 31 * 201);
    // Row-major: Λ outer, τ inner.
    assert_eq!((rows[0][1], rows[200][1], rows[201][1]), (-3.0, -3.0, -2.8));
}

#[test]
fn free_scan_reports_its_violation_window() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&["lg-scan", "--n", "100", "--lambda", "0", "--tau-max", "1", "--tau-steps", "400", "--out", out]);
    let row = &sidecar(dir.path())["rows"][0];
    let first = row["first_violation"].as_f64().unwrap();
    let end = row["violation_end"].as_f64().unwrap();
    // LG first clears 1 + 1e-6 at 0.09; it crosses 1.5 near 0.125.
    assert!((first - 0.09).abs() < 1e-12, "{first}");
    assert!((end - 0.25).abs() <= 0.01, "{end}");
    let (_, rows) = read_table(&dir.path().join("lg_scan.csv"));
    let half = rows.iter().find(|r| r[5] > 1.5).unwrap()[0];
    assert!((half - 0.125).abs() <= 0.01, "{half}");
}

#[test]
fn initial_state_scan() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&[
        "lg-scan", "--n", "40", "--lambda", "1", "--init-min", "20", "--init-max", "40", "--init-stride", "10",
        "--tau-max", "0.5", "--tau-steps", "50", "--out", out,
    ]);
    let (header, rows) = read_table(&dir.path().join("lg_scan.csv"));
    assert_eq!(header[1], "init_left");
    assert_eq!(rows.len(), 3 * 51);
    assert_eq!(sidecar(dir.path())["axis"], "init_left");
}

#[test]
fn output_is_identical_across_runs_and_workers() {
    let args = ["lg-scan", "--n", "30", "--lambda-min", "-2", "--lambda-max", "2", "--lambda-steps", "6", "--tau-max", "0.5", "--tau-steps", "40"];
    let mut outputs = Vec::new();
    for workers in ["1", "1", "3"] {
        let dir = TempDir::new().unwrap();
        let mut all = args.to_vec();
        all.extend(["--workers", workers, "--out", dir.path().to_str().unwrap()]);
        ok(&all);
        outputs.push((
            std::fs::read(dir.path().join("lg_scan.csv")).unwrap(),
            std::fs::read(dir.path().join("run.json")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);

    let env = bin().args(args).env("BJJ_LGI_WORKERS", "2").output().unwrap();
    let flag = ok(&[&args[..], &["--workers", "1"]].concat());
    assert_eq!(env.stdout, flag.stdout);
}

#[test]
fn single_boson_measurement_effect() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&["measurement-effect", "--n", "1", "--lambda", "0", "--tau-max", "0.5", "--tau-steps", "100", "--out", out]);
    let (header, rows) = read_table(&dir.path().join("measurement_effect.csv"));
    assert_eq!(header, ["n", "tau_over_2pi", "mean_q3_measured", "mean_q3_unmeasured", "diff"]);
    assert_eq!(rows[0][4], 0.0);
    for r in &rows {
        // A measurement at τ turns cos 2Jτ into cos² Jτ.
        let jt = 2.0 * PI * r[1];
        assert!((r[4] - jt.sin().powi(2)).abs() < 1e-10);
    }
}

#[test]
fn measurement_effect_grows_with_n() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&["measurement-effect", "--n", "10,100", "--tau-max", "1", "--tau-steps", "200", "--out", out]);
    let peaks = &sidecar(dir.path())["max_diff"];
    let (small, large) = (peaks[0]["max_diff"].as_f64().unwrap(), peaks[1]["max_diff"].as_f64().unwrap());
    assert_eq!(peaks[1]["n"], 100);
    assert!(large > small, "{large} vs {small}");
}

#[test]
fn rabi_regime_for_eight_bosons() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&["rabi", "--n", "8", "--lambda", "-50", "--out", out]);
    let s = &sidecar(dir.path())["summaries"][0];
    assert!((s["lg_max"].as_f64().unwrap() - 1.5).abs() <= 0.05);
    assert_eq!(s["accessible"], true);
    let (header, rows) = read_table(&dir.path().join("rabi_oscillation.csv"));
    assert_eq!(rows.len(), 601);
    let (full, two) = (column(&header, "p_n0"), column(&header, "p_n0_two_level"));
    assert!(rows.iter().all(|r| (r[full] - r[two]).abs() < 0.05));

    let free = ok(&["rabi", "--n", "8", "--lambda", "0", "--rabi-steps", "10"]);
    let (header, rows) = table(std::str::from_utf8(&free.stdout).unwrap());
    assert!((rows[0][column(&header, "overlap_n0")] - 1.0 / 16.0).abs() < 1e-12);
}

#[test]
fn rabi_regime_is_out_of_reach_for_a_hundred_bosons() {
    let out = ok(&["rabi", "--n", "100", "--lambda-min", "-100", "--lambda-max", "-2.5", "--lambda-steps", "39", "--rabi-steps", "10"]);
    let (header, rows) = table(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(rows.len(), 40);
    let accessible = column(&header, "accessible");
    assert!(rows.iter().all(|r| r[accessible] == 0.0));
}

#[test]
fn analytic_check_agrees_and_lists_tau0() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&["analytic-check", "--n", "1,5,20,100", "--tau-max", "1", "--tau-steps", "10", "--tau-unit", "raw", "--out", out]);
    let (header, rows) = read_table(&dir.path().join("analytic_check.csv"));
    assert_eq!(header, ["n", "tau_j", "max_deviation", "lg_deviation"]);
    assert_eq!(rows.len(), 4 * 11);
    assert!(rows.iter().all(|r| r[2] < 1e-8 && r[3] < 1e-8));
    let (header, rows) = read_table(&dir.path().join("tau0.csv"));
    assert_eq!(header, ["n", "tau0_j"]);
    assert_eq!(rows[0][0], 1.0);
    assert!((rows[0][1] - PI / 2.0).abs() < 1e-15);
    assert!(sidecar(dir.path())["max_deviation"].as_f64().unwrap() < 1e-8);
}

#[test]
fn flags_override_config_and_are_echoed() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n": 6, "lambda": 3.0, "tau_max": 0.5, "tau_steps": 5, "format": "json"}"#).unwrap();
    let out = dir.path().join("out");
    ok(&["lg-scan", "--config", cfg.to_str().unwrap(), "--lambda", "-1", "--out", out.to_str().unwrap()]);
    let side = sidecar(&out);
    assert_eq!(side["command"], "lg-scan");
    assert_eq!(side["config"]["lambda"], -1.0);
    assert_eq!(side["config"]["n"], serde_json::json!([6]));
    assert_eq!(side["config"]["hopping"], 1.0);
    assert_eq!(side["config"]["tau_unit"], "two-pi");
    let data: Value = serde_json::from_str(&std::fs::read_to_string(out.join("lg_scan.json")).unwrap()).unwrap();
    assert_eq!(data["rows"].as_array().unwrap().len(), 6);
    assert_eq!(data["rows"][0][1], -1.0);

    std::fs::write(&cfg, r#"{"n": 6, "lamda": 3.0}"#).unwrap();
    assert_eq!(run(&["lg-scan", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn csv_files_use_lf_and_full_precision() {
    let out = ok(&["evolve", "--n", "3", "--lambda", "0.7", "--tmax", "0.3", "--tsteps", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let second = text.lines().nth(2).unwrap();
    // 17 significant digits: one before the point, sixteen after.
    let mantissa = second.split(',').nth(1).unwrap().split('e').next().unwrap();
    assert_eq!(mantissa.len(), 18, "{mantissa}");
}
