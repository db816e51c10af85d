//! End-to-end checks of the command-line surface: exit codes, file formats,
//! and report determinism.

use bfly_core::report::ScanReport;
use bfly_core::sbox::Sbox;
use std::path::Path;
use std::process::{Command, Output};

fn bfly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bfly"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn scan_theorem1_holds_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("t1.json");
    let csv = dir.path().join("t1.csv");
    let out = bfly(&[
        "--n",
        "3",
        "--i",
        "1,2",
        "--json",
        json.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
        "scan",
        "theorem1",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("claim HOLDS"));
    let report = ScanReport::load(&json).unwrap();
    assert!(report.summary.claim_holds);
    assert_eq!(report.rows.len(), 14);
    let from_csv = ScanReport::load(&csv).unwrap();
    assert_eq!(from_csv.rows, report.rows);
}

#[test]
fn scan_json_is_deterministic_modulo_timing() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = bfly(&[
            "--n",
            "3",
            "--i",
            "1",
            "--json",
            path.to_str().unwrap(),
            "scan",
            "gold",
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let strip = |p: &Path| ScanReport::load(p).unwrap().without_timing().to_json();
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn build_then_analyze_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sbox_path = dir.path().join("v.sbox");
    let out = bfly(&[
        "--n",
        "3",
        "--i",
        "1",
        "butterfly",
        "build",
        "--alpha",
        "2",
        "--beta",
        "5",
        "--kind",
        "closed",
        "--out",
        sbox_path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let s = Sbox::load(&sbox_path).unwrap();
    assert_eq!(s.m(), 6);
    assert!(s.is_permutation());

    let json_path = dir.path().join("report.json");
    let out = bfly(&[
        "--json",
        json_path.to_str().unwrap(),
        "analyze",
        "--in",
        sbox_path.to_str().unwrap(),
        "--ddt",
        "--bct",
        "--walsh",
        "--degree",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(report["m"], 6);
    assert_eq!(report["is_permutation"], true);
    assert_eq!(report["differential_uniformity"], 4);
    assert_eq!(report["boomerang_uniformity"], 4);
    assert_eq!(report["nonlinearity"], 24);
    assert_eq!(report["algebraic_degree"], 2);
    assert!(report["ddt_histogram"].is_object());
    assert!(report["bct_histogram"].is_object());
}

#[test]
fn open_butterfly_build_is_a_permutation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.sbox");
    let out = bfly(&[
        "--n",
        "3",
        "--i",
        "2",
        "butterfly",
        "build",
        "--alpha",
        "3",
        "--beta",
        "4",
        "--kind",
        "open",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(Sbox::load(&path).unwrap().is_permutation());
}

#[test]
fn gamma_csv_has_full_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gamma.csv");
    let out = bfly(&[
        "--n",
        "3",
        "--i",
        "1",
        "--csv",
        path.to_str().unwrap(),
        "butterfly",
        "gamma",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let body = std::fs::read_to_string(&path).unwrap();
    let mut lines = body.lines();
    assert_eq!(
        lines.next(),
        Some("alpha,beta,in_gamma,phi1,phi2,phi3,phi4")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 49);
    assert_eq!(rows.iter().filter(|r| r.contains(",true,")).count(), 7);
    assert!(rows.contains(&"1,1,true,0,0,0,1"));
}

#[test]
fn equiv_gold_reports_witness() {
    let out = bfly(&[
        "--n", "3", "--i", "1", "equiv", "gold", "--alpha", "1", "--beta", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["witness"]["a"], 0);
    assert_eq!(report["witness"]["b"], 1);

    let out = bfly(&[
        "--n",
        "3",
        "--i",
        "1",
        "equiv",
        "gold",
        "--alpha",
        "2",
        "--beta",
        "5",
        "--all-witnesses",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report["witness_count"].as_u64().unwrap() >= 1);
}

#[test]
fn usage_and_config_errors_exit_2() {
    // unknown flag: clap usage error
    let out = bfly(&["scan", "theorem1", "--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(2));
    // reducible modulus: configuration error
    let out = bfly(&["--n", "3", "--modulus", "9", "scan", "theorem1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reducible"));
    // branch index sharing a factor with n
    let out = bfly(&["--n", "3", "--i", "3", "scan", "theorem1"]);
    assert_eq!(out.status.code(), Some(2));
    // even n cannot host the quadratic tower
    let out = bfly(&["--n", "4", "--i", "1", "scan", "theorem1"]);
    assert_eq!(out.status.code(), Some(2));
    // gamma outside the member set for equiv gold
    let out = bfly(&[
        "--n", "3", "--i", "1", "equiv", "gold", "--alpha", "2", "--beta", "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside Gamma"));
}

#[test]
fn analyze_bct_refuses_non_bijection() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("const.sbox");
    let s = Sbox::new(4, vec![0; 16]).unwrap();
    s.save(&path).unwrap();
    let out = bfly(&["analyze", "--in", path.to_str().unwrap(), "--bct"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bijective"));
    // DDT of a non-permutation is fine
    let out = bfly(&["analyze", "--in", path.to_str().unwrap(), "--ddt"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn jobs_flag_gives_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.json");
    let many = dir.path().join("many.json");
    let out = bfly(&[
        "--n",
        "3",
        "--i",
        "1,2",
        "--jobs",
        "1",
        "--json",
        one.to_str().unwrap(),
        "scan",
        "conjecture",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = bfly(&[
        "--n",
        "3",
        "--i",
        "1,2",
        "--json",
        many.to_str().unwrap(),
        "scan",
        "conjecture",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let strip = |p: &Path| ScanReport::load(p).unwrap().without_timing().to_json();
    assert_eq!(strip(&one), strip(&many));
}
