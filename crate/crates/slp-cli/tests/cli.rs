//! End-to-end runs of the `slp` binary: output schemas, exit codes,
//! determinism, and the canonical-form round trip.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn slp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slp"))
        .args(args)
        .output()
        .expect("failed to launch slp")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("slp-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn eigs_reports_both_multiplicities() {
    // The stepped example at s = -2: eigenvalues 1/2 and 1, both simple.
    let out = slp(&["eigs", &fixture("example5_5.json")]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["kind"], "finite");
    let eigs = v["eigenvalues"].as_array().unwrap();
    assert_eq!(eigs.len(), 2);
    assert!((eigs[0]["value"][0].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!((eigs[1]["value"][0].as_f64().unwrap() - 1.0).abs() < 1e-9);
    for e in eigs {
        assert_eq!(e["analytic_mult"], 1);
        assert_eq!(e["geometric_mult"], 1);
    }
}

#[test]
fn eigs_degenerate_multiplicity_pair() {
    // Separated family at c = -1+i: eigenvalue 0 with multiplicities (2, 1).
    let out = slp(&["eigs", &fixture("example5_1.json")]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let eigs = v["eigenvalues"].as_array().unwrap();
    assert_eq!(eigs.len(), 1);
    assert!(eigs[0]["value"][0].as_f64().unwrap().abs() < 1e-8);
    assert_eq!(eigs[0]["analytic_mult"], 2);
    assert_eq!(eigs[0]["geometric_mult"], 1);
}

#[test]
fn eigs_oracle_agrees() {
    let out = slp(&["eigs", &fixture("example5_5.json"), "--oracle"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["oracle"]["ok"], true);
}

#[test]
fn eigs_whole_plane_marker() {
    let out = slp(&["eigs", &fixture("whole_plane.json")]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["kind"], "whole_plane");
}

#[test]
fn invalid_coefficient_exits_2_with_position() {
    let out = slp(&["eigs", &fixture("invalid_f.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("f[1]"),
        "diagnostic should name the entry: {}",
        stderr(&out)
    );
}

#[test]
fn classify_reports_class_and_charts() {
    let out = slp(&["classify", &fixture("example5_5.json")]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["classification"], "coupled");
    assert_eq!(v["self_adjoint"], true);
    assert!(v["self_adjoint_chart"]["chart"].is_string());
    assert!(v["coupled"]["gamma"].is_number());

    let out = slp(&["classify", &fixture("example5_5.json"), "--format", "csv"]);
    let text = stdout(&out);
    assert!(text.starts_with("classification,self_adjoint,chart\n"));
    assert!(text.contains("coupled,true,"));
}

#[test]
fn branch_csv_matches_closed_form() {
    let out_path = temp_path("branch53.csv");
    let out = slp(&[
        "branch",
        &fixture("example5_3_family.json"),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "param,branch_id,lambda_re,lambda_im,analytic_mult,geometric_mult"
    );
    let mut rows = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let alpha: f64 = cols[0].parse().unwrap();
        let re: f64 = cols[2].parse().unwrap();
        let im: f64 = cols[3].parse().unwrap();
        let want = (2.0 * alpha.cos() + alpha.sin()) / (alpha.cos() + alpha.sin());
        assert!((re - want).abs() < 1e-9, "alpha = {alpha}: {re} vs {want}");
        assert!(im.abs() < 1e-9);
        rows += 1;
    }
    assert!(rows >= 100);
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn branch_runs_are_byte_identical() {
    let p1 = temp_path("det1.csv");
    let p2 = temp_path("det2.csv");
    for p in [&p1, &p2] {
        let out = slp(&[
            "branch",
            &fixture("example5_7_family.json"),
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let (a, b) = (std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    assert_eq!(a, b, "branch output differs between runs");
    std::fs::remove_file(&p1).ok();
    std::fs::remove_file(&p2).ok();
}

#[test]
fn weight_family_branches_match_piecewise_forms() {
    let out_path = temp_path("branch57.csv");
    let out = slp(&[
        "branch",
        &fixture("example5_7_family.json"),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&out_path).unwrap();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let t: f64 = cols[0].parse().unwrap();
        let id: u32 = cols[1].parse().unwrap();
        let re: f64 = cols[2].parse().unwrap();
        let w1 = 1.0 + t;
        let want = if id == 0 {
            (1.0 / w1).min(1.0)
        } else {
            (1.0 / w1).max(1.0)
        };
        assert!(
            (re - want).abs() < 1e-9,
            "w1 = {w1}, branch {id}: {re} vs {want}"
        );
    }
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn derivative_equation_direction() {
    let out = slp(&[
        "derivative",
        &fixture("example5_6.json"),
        "--lambda",
        "0.5",
        "--tangent",
        r#"{"kind":"equation","h":[0,0,0],"k":[1,0],"l":[0,0]}"#,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn derivative_separated_angles() {
    // S_{0,π} problem written inline; dΛ/dα = -1, dΛ/dβ = 1 at λ = 2.
    let path = temp_path("sep.json");
    std::fs::write(
        &path,
        r#"{"N": 2, "f": [1, 1, 1], "q": [0, 0], "w": [1, 1],
           "bc": {"kind": "separated", "alpha": 0.0, "beta": 3.141592653589793}}"#,
    )
    .unwrap();
    let out = slp(&[
        "derivative",
        path.to_str().unwrap(),
        "--lambda",
        "2",
        "--tangent",
        r#"{"kind":"separated"}"#,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["d_alpha"].as_f64().unwrap() + 1.0).abs() < 1e-9);
    assert!((v["d_beta"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    std::fs::remove_file(&path).ok();
}

#[test]
fn derivative_rejects_double_eigenvalue() {
    // w1-family base problem has the double eigenvalue 1.
    let path = temp_path("double.json");
    std::fs::write(
        &path,
        r#"{"N": 2, "f": [-1, 1, 1], "q": [0, 0], "w": [1, 1],
           "bc": {"kind": "matrix", "A": [[1, -1], [0, 1]], "B": [[0, 1], [-1, 0]]}}"#,
    )
    .unwrap();
    let out = slp(&[
        "derivative",
        path.to_str().unwrap(),
        "--lambda",
        "1",
        "--tangent",
        r#"{"kind":"equation","h":[0,0,0],"k":[1,0],"l":[0,0]}"#,
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not simple"), "{}", stderr(&out));
    std::fs::remove_file(&path).ok();
}

#[test]
fn oracle_compare_passes_on_fixture() {
    let out = slp(&["oracle-compare", &fixture("example5_1.json")]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["ok"], true);
}

#[test]
fn examples_regenerate_and_self_verify() {
    let dir = temp_path("figs");
    let out = slp(&["examples", "--out-dir", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    for k in 1..=6 {
        let csv = dir.join(format!("fig5_{k}.csv"));
        let sidecar = dir.join(format!("fig5_{k}.ref.json"));
        assert!(csv.exists() && sidecar.exists());
        // CSV rows pair 1:1 with sidecar reference rows.
        let rows = std::fs::read_to_string(&csv).unwrap().lines().count() - 1;
        let refs: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&sidecar).unwrap()).unwrap();
        assert_eq!(refs["rows"].as_array().unwrap().len(), rows);
    }
    // Byte-identical on a second run.
    let first = std::fs::read(dir.join("fig5_4.csv")).unwrap();
    let out = slp(&["examples", "--out-dir", dir.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(first, std::fs::read(dir.join("fig5_4.csv")).unwrap());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn canonical_files_round_trip_byte_identical() {
    use slp_cli::io::ProblemFile;
    let original = std::fs::read_to_string(fixture("example5_5.json")).unwrap();
    let parsed = ProblemFile::parse(&original).unwrap();
    let canonical = parsed.to_canonical_json();
    let reparsed = ProblemFile::parse(&canonical).unwrap();
    assert_eq!(reparsed.to_canonical_json(), canonical);
}

#[test]
fn unknown_command_exits_2() {
    let out = slp(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("usage"));
}
