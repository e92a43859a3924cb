use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ticketzone"))
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

const INTERVAL: &str = r#"{"vertices":[0,1],"edges":[{"id":0,"from":0,"to":1,"length":1.0}],"truncated_ends":[0,1]}"#;
const FREE_INTERVAL: &str = r#"{"vertices":[0,1],"edges":[{"id":0,"from":0,"to":1,"length":1.0}]}"#;
const CYCLE: &str = r#"{"vertices":[0],"edges":[{"id":0,"from":0,"to":0,"length":1.0}]}"#;
const HALF_LINE: &str = r#"{"vertices":[0,1],"edges":[{"id":0,"from":0,"to":1,"length":20.0}],
  "truncated_ends":[{"vertex":1,"condition":"free","tag":"ray"}]}"#;

#[test]
fn spectrum_of_dirichlet_interval() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "interval.json", INTERVAL);
    let out = stdout(&run(&["spectrum", g.to_str().unwrap(), "--mesh", "1e-3", "--count", "2"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let lambda = v["lambda"].as_f64().unwrap();
    assert!((lambda - PI * PI).abs() <= 1e-6 * PI * PI, "{lambda}");
    let second = v["eigenvalues"][1]["lambda_extrapolated"].as_f64().unwrap();
    assert!((second - 4.0 * PI * PI).abs() <= 1e-5 * 4.0 * PI * PI);
}

#[test]
fn spectrum_of_subgraph_forms() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "cycle.json", CYCLE);
    let out = stdout(&run(&["spectrum", g.to_str().unwrap(), "--subgraph", "ball:0:0.25", "--eigenfunction"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let lambda = v["lambda"].as_f64().unwrap();
    assert!((lambda - PI * PI / 0.25).abs() < 1e-3 * PI * PI / 0.25);
    assert!(!v["eigenfunction"].as_array().unwrap().is_empty());

    let s = write(dir.path(), "arc.json", r#"{"intervals":[{"edge":0,"start":0.25,"end":0.75}]}"#);
    let out = stdout(&run(&["spectrum", g.to_str().unwrap(), "--subgraph", s.to_str().unwrap()]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["lambda"].as_f64().unwrap() - 4.0 * PI * PI).abs() < 4e-3 * PI * PI);
}

#[test]
fn ball_scan_on_cycle_is_csv() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "cycle.json", CYCLE);
    let args = ["scan", g.to_str().unwrap(), "--mode", "ball", "--root", "0", "--rmin", "0.05", "--rmax", "0.45", "--step", "0.05"];
    let out = stdout(&run(&args));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("radius,lambda,error_indicator"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 9);
    for (r, lambda) in rows {
        let exact = PI * PI / (4.0 * r * r);
        assert!((lambda - exact).abs() <= 1e-3 * exact, "R={r}: {lambda} vs {exact}");
    }
}

#[test]
fn partition_of_free_interval() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "interval.json", FREE_INTERVAL);
    let p = dir.path().join("partition.json");
    let out = stdout(&run(&["partition", g.to_str().unwrap(), "--k", "3", "--partition-out", p.to_str().unwrap()]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let energy = v["energy"].as_f64().unwrap();
    assert!((energy - 4.0 * PI * PI).abs() <= 1e-2 * 4.0 * PI * PI);
    let part: serde_json::Value = serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap();
    assert_eq!(part["clusters"].as_array().unwrap().len(), 3);
}

#[test]
fn partition_with_classification() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "half.json", HALF_LINE);
    let out = stdout(&run(&["partition", g.to_str().unwrap(), "--k", "1", "--root", "0"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["verdict"]["classification"].is_string());
    assert!(v["verdict"]["sigma"]["lower"].as_f64().unwrap() >= 0.0);
}

#[test]
fn zones_on_half_line() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "half.json", HALF_LINE);
    let p = dir.path().join("rings.json");
    let lambda = format!("{}", PI * PI);
    let args = ["zones", g.to_str().unwrap(), "--root", "0", "--lambda", &lambda, "--rings", "3", "--partition-out", p.to_str().unwrap()];
    let out = stdout(&run(&args));
    let rows: Vec<Vec<f64>> = out.lines().skip(1).map(|l| l.split(',').map(|f| f.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!((r[2] - r[1] - 1.0).abs() <= 1e-3);
        assert!((r[3] - PI * PI).abs() <= 1e-3 * PI * PI);
    }
    assert!(p.exists());
}

#[test]
fn output_is_byte_identical_across_job_counts() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "half.json", HALF_LINE);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (jobs, out) in [("1", &a), ("4", &b)] {
        let o = run(&["--jobs", jobs, "--out", out.to_str().unwrap(), "sigma", g.to_str().unwrap(), "--root", "0"]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn gallery_case_passes_and_writes_report() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("report.json");
    let out = stdout(&run(&["validate-gallery", "--case", "interval-oracle", "--report", report.to_str().unwrap()]));
    assert!(out.contains("interval-oracle"));
    assert!(out.contains("PASS"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v[0]["passed"], serde_json::Value::Bool(true));
}

#[test]
fn gallery_lists_all_cases() {
    let out = stdout(&run(&["validate-gallery", "--list"]));
    assert_eq!(out.lines().count(), 9);
}

#[test]
fn errors_give_nonzero_exit() {
    let dir = TempDir::new().unwrap();
    assert!(!run(&["validate-gallery", "--case", "no-such-case"]).status.success());
    assert!(!run(&["spectrum", dir.path().join("missing.json").to_str().unwrap()]).status.success());
    let bad = write(dir.path(), "bad.json", r#"{"vertices":[0,1],"edges":[{"id":0,"from":0,"to":1,"length":-1.0}]}"#);
    let o = run(&["spectrum", bad.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let g = write(dir.path(), "cycle.json", CYCLE);
    assert!(!run(&["scan", g.to_str().unwrap(), "--root", "7", "--rmin", "0.1", "--rmax", "0.2", "--step", "0.1"]).status.success());
}
