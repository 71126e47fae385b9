//! End-to-end behaviour of the `nbinv` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nbinv_core::instances::{ScalarDesc, ScalarMatrix};
use nbinv_core::serial::matrix_to_json;
use nbinv_core::{BanachAlgebra, Matrix};

fn nbinv(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nbinv"))
        .args(args)
        .current_dir(dir)
        .env_remove("NBINV_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn m(k: usize, re: &[f64]) -> ScalarMatrix {
    ScalarMatrix::from_real(k, re)
}

fn write_matrix(dir: &Path, name: &str, t: &Matrix<ScalarMatrix>) {
    fs::write(dir.join(name), matrix_to_json(t)).unwrap();
}

fn certificate(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("certificate.json")).unwrap()).unwrap()
}

#[test]
fn identity_inverts_with_every_applicable_method() {
    let tmp = tempfile::tempdir().unwrap();
    let id = Matrix::identity(2, &ScalarDesc { k: 2 });
    write_matrix(tmp.path(), "id.json", &id);
    for method in ["triangular", "prop4", "thm6", "hermitian", "oracle"] {
        let out = format!("out-{method}");
        let o = nbinv(tmp.path(), &["invert", "id.json", "--method", method, "--out", &out]);
        assert_eq!(o.status.code(), Some(0), "{method}: {}", stderr(&o));
        let cert = certificate(&tmp.path().join(&out));
        assert_eq!(cert["residual_left"], 0.0, "{method}");
        assert_eq!(cert["residual_right"], 0.0, "{method}");
        assert_eq!(cert["method"], method);
    }
}

#[test]
fn triangular_output_shows_the_corner_identity() {
    let tmp = tempfile::tempdir().unwrap();
    let t = Matrix::from_rows(vec![
        vec![m(2, &[2.0, 1.0, 0.0, 1.0]), m(2, &[0.5, -1.0, 3.0, 0.25])],
        vec![ScalarMatrix::zero(&ScalarDesc { k: 2 }), m(2, &[1.0, 0.0, -2.0, 4.0])],
    ])
    .unwrap();
    write_matrix(tmp.path(), "tri.json", &t);
    let o = nbinv(tmp.path(), &["invert", "tri.json", "--method", "triangular", "--out", "."]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let defect: f64 =
        text.lines().find_map(|l| l.strip_prefix("s12 + s11*t12*s22 = ")).expect("identity line").parse().unwrap();
    assert!(defect <= 1e-12, "{text}");
}

#[test]
fn hermitian_three_by_three_records_padding_and_nesting() {
    let tmp = tempfile::tempdir().unwrap();
    let b = m(2, &[0.5, -1.0, 0.25, 2.0]);
    let c = m(2, &[1.0, 0.0, 0.5, -0.5]);
    let d = m(2, &[0.0, 0.3, 0.3, 0.0]);
    let t = Matrix::from_rows(vec![
        vec![m(2, &[3.0, 1.0, 1.0, 2.0]), b.clone(), c.clone()],
        vec![b.star().unwrap(), m(2, &[-1.0, 0.0, 0.0, 4.0]), d.clone()],
        vec![c.star().unwrap(), d.star().unwrap(), m(2, &[2.0, 0.5, 0.5, 1.0])],
    ])
    .unwrap();
    write_matrix(tmp.path(), "h.json", &t);
    let o = nbinv(tmp.path(), &["invert", "h.json", "--method", "hermitian", "--out", "."]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cert = certificate(tmp.path());
    assert_eq!(cert["padded_to"], 4);
    assert_eq!(cert["nest_levels"], 1);
    assert!(stdout(&o).contains("padded_to       4"));
}

#[test]
fn parse_errors_exit_2_and_engine_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("bad.json"), r#"{"n": 2, "instance": {"kind": "quaternion"}, "entries": []}"#).unwrap();
    let o = nbinv(tmp.path(), &["invert", "bad.json"]);
    assert_eq!(o.status.code(), Some(2));

    let o = nbinv(tmp.path(), &["invert", "missing.json"]);
    assert_eq!(o.status.code(), Some(2));

    let t = Matrix::identity(3, &ScalarDesc { k: 1 });
    write_matrix(tmp.path(), "three.json", &t);
    let o = nbinv(tmp.path(), &["invert", "three.json", "--method", "prop4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error:"), "{}", stderr(&o));

    let o = nbinv(tmp.path(), &["invert", "three.json", "--method", "gauss"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn singular_input_is_refused_with_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let one = m(1, &[1.0]);
    let t = Matrix::from_rows(vec![vec![one.clone(), one.clone()], vec![one.clone(), one]]).unwrap();
    write_matrix(tmp.path(), "singular.json", &t);
    for method in ["prop4", "oracle"] {
        let o = nbinv(tmp.path(), &["invert", "singular.json", "--method", method]);
        assert_eq!(o.status.code(), Some(1), "{method}");
    }
}

#[test]
fn radius_reports_both_algebras() {
    let tmp = tempfile::tempdir().unwrap();
    let t = Matrix::from_rows(vec![vec![m(1, &[0.5]), m(1, &[10.0])], vec![m(1, &[0.0]), m(1, &[-0.25])]]).unwrap();
    write_matrix(tmp.path(), "t.json", &t);
    let o = nbinv(tmp.path(), &["radius", "t.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ra = report["radius_a"].as_f64().unwrap();
    assert!((ra - 0.5).abs() <= 0.025, "{ra}");
    assert!(report["discrepancy"].as_f64().unwrap() <= 1e-12);

    let o = nbinv(tmp.path(), &["radius", "t.json", "--n-max", "100"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seed_flag_beats_environment_and_config() {
    let tmp = tempfile::tempdir().unwrap();
    let config = r#"{"seed": 1, "suites": [{"property": "elimination_oracle", "trials": 3}]}"#;
    fs::write(tmp.path().join("c.json"), config).unwrap();
    let seeds = |args: &[&str], env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_nbinv"));
        cmd.args(args).current_dir(tmp.path()).env_remove("NBINV_SEED");
        if let Some(v) = env {
            cmd.env("NBINV_SEED", v);
        }
        assert_eq!(cmd.output().unwrap().status.code(), Some(0));
        let lines = fs::read_to_string(tmp.path().join("out/outcomes.jsonl")).unwrap();
        lines
            .lines()
            .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["seed"].as_u64().unwrap())
            .collect::<Vec<_>>()
    };
    let base = ["suite", "--config", "c.json", "--out", "out"];
    let from_config = seeds(&base, None);
    let from_env = seeds(&base, Some("2"));
    let mut with_flag = base.to_vec();
    with_flag.extend(["--seed", "2"]);
    let from_flag = seeds(&with_flag, Some("3"));
    let flag_only = seeds(&with_flag, None);
    assert_ne!(from_config, from_env);
    assert_eq!(from_flag, flag_only);
    assert_eq!(from_env, flag_only);
}

#[test]
fn strict_symmetry_fails_and_replay_reproduces_the_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let o = nbinv(tmp.path(), &["symmetry", "--out", "sym"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = nbinv(tmp.path(), &["symmetry", "--strict", "--out", "sym-strict"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    let line = err.lines().find(|l| l.starts_with("FAILURE property=symmetric_control")).expect("failure line");
    let trial = line.split("trial=").nth(1).unwrap().split(' ').next().unwrap();
    let seed = line.split("seed=").nth(1).unwrap().split(' ').next().unwrap();

    let recorded = fs::read_to_string(tmp.path().join("sym-strict/outcomes.jsonl")).unwrap();
    let original = recorded
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .find(|v| v["property"] == "symmetric_control" && v["trial"].as_u64().unwrap().to_string() == trial)
        .unwrap();
    assert_eq!(original["seed"].to_string(), seed);
    assert!(original["input"].is_object());

    let spec = format!("symmetric_control:{trial}");
    let o = nbinv(tmp.path(), &["suite", "--strict", "--replay", &spec]);
    assert_eq!(o.status.code(), Some(1));
    let replayed: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(replayed, original);

    let certs = fs::read_dir(tmp.path().join("sym-strict/certificates")).unwrap().count();
    assert!(certs >= 1);
}

#[test]
fn csv_format_prints_the_summary_table() {
    let tmp = tempfile::tempdir().unwrap();
    let o = nbinv(tmp.path(), &["srp", "--format", "csv", "--out", "srp"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("property,trials,passes,worst_residual,seed_of_worst"), "{text}");
    assert!(text.contains("srp_lift,50,50,"));
    assert_eq!(fs::read_to_string(tmp.path().join("srp/summary.csv")).unwrap().trim_end(), text.trim_end());
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(nbinv(tmp.path(), &[]).status.code(), Some(2));
    assert_eq!(nbinv(tmp.path(), &["suite", "--seed", "minus-one"]).status.code(), Some(2));
    assert_eq!(nbinv(tmp.path(), &["suite", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(nbinv(tmp.path(), &["suite", "--replay", "srp_lift"]).status.code(), Some(2));
    fs::write(tmp.path().join("c.json"), r#"{"suites": [{"property": "srp_lift", "trials": 1, "tolerance": -1}]}"#)
        .unwrap();
    assert_eq!(nbinv(tmp.path(), &["suite", "--config", "c.json"]).status.code(), Some(2));
}
