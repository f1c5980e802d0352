use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvescat"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn sidecar(path: &Path) -> Value {
    let mut p = path.as_os_str().to_owned();
    p.push(".json");
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn hemisphere_gives_the_cardioid() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["xsec", "--alpha", "0.5pi", "--method", "classical", "--count", "181", "-o", "c.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = read_csv(&dir.path().join("c.csv"));
    let theta = column(&h, &rows, "theta");
    let d = column(&h, &rows, "classical_normalized");
    let raw = column(&h, &rows, "classical");
    for ((t, v), r) in theta.iter().zip(&d).zip(&raw) {
        assert!((v - 0.25 * (0.5 * t).cos()).abs() < 1e-12, "{t}: {v}");
        assert!((r - 2.0 * v).abs() < 1e-15);
    }
    let meta = sidecar(&dir.path().join("c.csv"));
    assert_eq!(meta["method"], "classical");
    assert_eq!(meta["alpha"].as_f64().unwrap(), std::f64::consts::FRAC_PI_2);
    assert_eq!(meta["rows"], 181);
    assert!(meta["version"].is_string());
}

#[test]
fn shallow_extrusion_flags_the_empty_support() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["xsec", "--alpha", "0.25pi", "--count", "60", "-o", "d.csv"]);
    assert!(out.status.success());
    let (h, rows) = read_csv(&dir.path().join("d.csv"));
    let theta = column(&h, &rows, "theta");
    let d = column(&h, &rows, "classical");
    let flag = column(&h, &rows, "classical_supported");
    for i in 0..theta.len() {
        if theta[i].abs() > 0.5 {
            assert_eq!(d[i], 0.0);
            assert_eq!(flag[i], 0.0);
        }
    }
    assert!(flag.contains(&1.0));
}

#[test]
fn all_methods_share_one_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["xsec", "--alpha", "0.75pi", "--kr", "20", "--method", "all", "--count", "90", "--refine"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let path = dir.path().join("xsec.csv");
    let (h, rows) = read_csv(&path);
    assert_eq!(h, ["theta", "classical", "classical_normalized", "classical_supported", "quantum", "semiclassical", "semiclassical_valid"]);
    let theta = column(&h, &rows, "theta");
    assert!(theta.windows(2).all(|w| w[1] > w[0]));
    assert!(theta.len() > 90);
    assert!(sidecar(&path)["m_max"].as_u64().unwrap() > 14);
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["phase-table", "--alpha", "2.1", "--kr", "12.5", "-o", "p.csv"]);
    assert!(out.status.success());
    let json = run(dir.path(), &["phase-table", "--alpha", "2.1", "--kr", "12.5", "--format", "json", "-o", "p.json"]);
    assert!(json.status.success());
    let (h, rows) = read_csv(&dir.path().join("p.csv"));
    let from_csv = column(&h, &rows, "delta_m");
    let data: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("p.json")).unwrap()).unwrap();
    let from_json: Vec<f64> = data["data"]["delta_m"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(from_csv.len(), from_json.len());
    for (a, b) in from_csv.iter().zip(&from_json) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn sidecar_alone_reproduces_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["compare", "--alpha", "3pi/4", "--kr", "15", "--count", "40", "-o", "a.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let again = run(dir.path(), &["rerun", "a.csv.json", "-o", "b.csv"]);
    assert!(again.status.success(), "{}", String::from_utf8_lossy(&again.stderr));
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
    let meta = sidecar(&dir.path().join("a.csv"));
    assert!(meta["discrepancy"]["quantum_vs_semiclassical"].is_number());
}

#[test]
fn anomalous_tail_in_the_phase_table() {
    let dir = tempfile::tempdir().unwrap();
    let kr = format!("{}", (100.0f64 * 101.0).sqrt());
    assert!(run(dir.path(), &["phase-table", "--alpha", "0.875pi", "--kr", &kr, "-o", "r.csv"]).status.success());
    let (h, rows) = read_csv(&dir.path().join("r.csv"));
    let m = column(&h, &rows, "m");
    let s2 = column(&h, &rows, "sin2_delta_m");
    let edge = (100.0f64 * 101.0).sqrt() * (0.875 * std::f64::consts::PI).sin();
    assert!(m.iter().zip(&s2).any(|(&m, &s)| m > edge + 1.0 && s > 0.1));
    let beyond = column(&h, &rows, "beyond_edge");
    assert!(m.iter().zip(&beyond).all(|(&m, &b)| (b == 1.0) == (m > edge)));
}

#[test]
fn scan_reports_peaks() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["scan", "--alpha", "0.625pi", "--kr-min", "5", "--kr-max", "8", "--count", "61"]);
    assert!(out.status.success());
    let meta = sidecar(&dir.path().join("scan.csv"));
    let peaks = meta["peaks"].as_array().unwrap();
    assert_eq!(peaks.len(), 3);
    for p in peaks {
        assert!((p["kR"].as_f64().unwrap() - p["resonance_kR"].as_f64().unwrap()).abs() < 0.05);
    }
    let (h, rows) = read_csv(&dir.path().join("scan.csv"));
    let asym = column(&h, &rows, "asymptote");
    assert!(asym.iter().all(|&a| a == asym[0]));
}

#[test]
fn trajectories_by_angle_and_by_launch() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["trajectory", "--alpha", "0.25pi", "--theta", "0.25", "-o", "t.csv"]).status.success());
    let (h, rows) = read_csv(&dir.path().join("t.csv"));
    let path = column(&h, &rows, "path");
    assert!(path.contains(&0.0) && path.contains(&1.0));
    let seg = h.iter().position(|c| c == "segment").unwrap();
    assert!(rows.iter().any(|r| r[seg] == "sphere"));

    assert!(run(dir.path(), &["trajectory", "--alpha", "1.0", "--beta", "0", "--points", "101", "-o", "s.csv"]).status.success());
    let (h, rows) = read_csv(&dir.path().join("s.csv"));
    let y = column(&h, &rows, "y");
    assert!(y.iter().all(|v| v.abs() < 1e-12));
    let meta = sidecar(&dir.path().join("s.csv"));
    assert_eq!(meta["paths"].as_array().unwrap().len(), 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| run(dir.path(), args).status.code().unwrap();
    assert_eq!(code(&["xsec", "--alpha", "1.2pi"]), 2);
    assert_eq!(code(&["xsec", "--alpha", "1", "--method", "quantum"]), 2);
    assert_eq!(code(&["trajectory", "--alpha", "0.25pi", "--theta", "2.0"]), 2);
    assert_eq!(code(&["phase-table", "--alpha", "1", "--kr", "20", "--ode-rtol", "1e-300"]), 3);
    assert_eq!(code(&["xsec", "--alpha", "1", "-o", "missing/dir/x.csv"]), 4);
    assert_eq!(code(&["xsec", "--alpha", "1", "-o", "ok.csv"]), 0);
    let bad = Command::new(env!("CARGO_BIN_EXE_curvescat"))
        .current_dir(dir.path())
        .env("CURVESCAT_THREADS", "zero")
        .args(["xsec", "--alpha", "1"])
        .status()
        .unwrap();
    assert_eq!(bad.code(), Some(2));
}
