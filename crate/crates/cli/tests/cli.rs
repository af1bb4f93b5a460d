use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fuglede"))
        .args(args)
        .env("FUGLEDE_NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_union_example_passes() {
    let d = fixture("union_domain.json");
    let out = run(&["verify", "--domain", path_str(&d), "--spectrum", "2Z u 2Z+1/2", "--tiling", "period=2;residues=0,1/2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["pass"], true);
    assert_eq!(r["results"]["tiling"]["tiles"], true);
    assert!(r["results"]["orthogonality_defect"].as_f64().unwrap() < 1e-10);
    assert_eq!(r["results"]["parseval_defect_by_K"].as_array().unwrap().len(), 4);
}

#[test]
fn bmatrix_with_too_few_frequencies_is_an_input_error() {
    let d = fixture("union_domain.json");
    let out = run(&["bmatrix", "--domain", path_str(&d), "--spectrum", "{0}"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("span"));
    assert!(!String::from_utf8_lossy(&out.stderr).contains('\x1b'));
}

#[test]
fn bmatrix_recovers_the_union_matrix() {
    let d = fixture("union_domain.json");
    let out = run(&["bmatrix", "--domain", path_str(&d), "--spectrum", "2Z u 2Z+1/2", "--truncate", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let b = &json(&out)["results"]["bmatrix"];
    for (i, j, re, im) in [(0, 0, 0.5, 0.5), (0, 1, 0.5, -0.5), (1, 0, 0.5, -0.5), (1, 1, 0.5, 0.5)] {
        assert!((b["re"][i][j].as_f64().unwrap() - re).abs() < 1e-10);
        assert!((b["im"][i][j].as_f64().unwrap() - im).abs() < 1e-10);
    }
}

#[test]
fn nikodym_quotients_increase() {
    let out = run(&["nikodym", "--p-max", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out)["results"]["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 3);
    let q: Vec<f64> = rows.iter().map(|r| r["quotient"].as_f64().unwrap()).collect();
    assert!(q[0] >= 1e5 && q[1] > q[0] * 1e6 && q[2] > q[1] * 1e6);
    assert_eq!(run(&["nikodym", "--p-max", "5"]).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let d = fixture("union_domain.json");
    let b = fixture("union_bmatrix.json");
    let args = ["spectrum", "--domain", path_str(&d), "--bmatrix", path_str(&b), "--window", "-3", "3"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let sq = ["square2d", "--check-eigen", "--lmax", "2", "--G", "16", "--seed", "7"];
    let first = run(&sq);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, run(&sq).stdout);
    assert!(json(&first).get("wall_time_s").is_none());
    assert!(json(&run(&[&sq[..], &["--timing"]].concat())).get("wall_time_s").is_some());
}

#[test]
fn emitted_reports_are_accepted_as_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = fixture("union_domain.json");
    let b_report = dir.path().join("b.json");
    let s_report = dir.path().join("s.json");
    let s_csv = dir.path().join("s.csv");
    let b_out = run(&["bmatrix", "--domain", path_str(&d), "--spectrum", "2Z u 2Z+1/2", "--out", path_str(&b_report)]);
    assert_eq!(b_out.status.code(), Some(0));
    let b = path_str(&b_report);
    let s_out = run(&["spectrum", "--domain", b, "--bmatrix", b, "--window", "-3", "3", "--out", path_str(&s_report)]);
    assert_eq!(s_out.status.code(), Some(0));
    let s = path_str(&s_report);
    let again = run(&["spectrum", "--domain", s, "--bmatrix", s, "--window", "-3", "3"]);
    assert_eq!(again.stdout, std::fs::read(&s_report).unwrap());

    let csv = run(&["spectrum", "--domain", b, "--bmatrix", b, "--window", "-3", "3", "--format", "csv", "--out", path_str(&s_csv)]);
    assert_eq!(csv.status.code(), Some(0));
    let expected: Value = serde_json::from_slice(&std::fs::read(&b_report).unwrap()).unwrap();
    for spectrum in [s, path_str(&s_csv)] {
        let out = run(&["bmatrix", "--domain", s, "--spectrum", spectrum]);
        assert_eq!(out.status.code(), Some(0), "{spectrum}: {}", String::from_utf8_lossy(&out.stderr));
        let got = &json(&out)["results"]["bmatrix"];
        for part in ["re", "im"] {
            for i in 0..2 {
                for j in 0..2 {
                    let (x, y) = (got[part][i][j].as_f64().unwrap(), expected["results"]["bmatrix"][part][i][j].as_f64().unwrap());
                    assert!((x - y).abs() < 1e-9, "{spectrum} {part}[{i}][{j}]: {x} vs {y}");
                }
            }
        }
    }
}

#[test]
fn evolve_methods_agree() {
    let d = fixture("union_domain.json");
    let out = run(&["evolve", "--domain", path_str(&d), "--spectrum", "2Z u 2Z+1/2", "--f", "indicator:0:0.25", "--t", "-1.25", "--method", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!(r["residuals"]["spectral_vs_boundary"].as_f64().unwrap() < 1e-8);
    assert_eq!(r["results"]["snapped_t"].as_f64().unwrap(), -1.25);

    let b = fixture("union_bmatrix.json");
    let csv = run(&["evolve", "--domain", path_str(&d), "--bmatrix", path_str(&b), "--f", "exp:2.5", "--t", "0.3", "--method", "boundary", "--format", "csv"]);
    assert_eq!(csv.status.code(), Some(0));
    let text = String::from_utf8(csv.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# t=0.296875,snap_error="));
    assert_eq!(lines.next().unwrap(), "interval_index,x,re,im");
    assert_eq!(lines.count(), 128);
}

#[test]
fn tiling_failure_exits_one() {
    let d = fixture("union_domain.json");
    let out = run(&["tile", "--domain", path_str(&d), "--tiling", "period=1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["results"]["defect"], "1/2");
    let unit = fixture("unit_domain.json");
    assert_eq!(run(&["tile", "--domain", path_str(&unit), "--tiling", "period=1"]).status.code(), Some(0));
}

#[test]
fn bad_input_exits_two() {
    let d = fixture("union_domain.json");
    assert_eq!(run(&["gram", "--domain", path_str(&d), "--spectrum", "2Y"]).status.code(), Some(2));
    assert_eq!(run(&["gram", "--domain", "/nonexistent.json", "--spectrum", "Z"]).status.code(), Some(2));
    assert_eq!(run(&["square2d", "--G", "63"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn gram_reports_orthogonality() {
    let unit = fixture("unit_domain.json");
    let out = run(&["gram", "--domain", path_str(&unit), "--spectrum", "Z+1/4", "--truncate", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["size"], 20);
    let d = fixture("union_domain.json");
    let bad = run(&["gram", "--domain", path_str(&d), "--spectrum", "Z |λ|<=2"]);
    assert_eq!(bad.status.code(), Some(1));
}
