//! Acceptance gate: one PASS/FAIL line per criterion, tolerances pinned here
//! rather than taken from the library defaults.
//!
//! Run with `cargo test -p nbinv-cli --test acceptance -- --nocapture` to see
//! the report.

use std::fs;
use std::path::Path;
use std::process::Command;

use nbinv_core::instances::{wiener_inverse, ScalarDesc, ScalarMatrix, Wiener};
use nbinv_core::rng::rng_from_seed;
use nbinv_core::serial::{matrix_to_json, AnyMatrix};
use nbinv_core::verify::random::random_matrix;
use nbinv_core::verify::{execute, ExperimentOutcome, Property, SuiteConfig, SuiteReport, SuiteSpec};
use nbinv_core::{AlgebraError, BanachAlgebra, C64};

struct Verdict {
    pass: bool,
    summary: String,
}

type Criterion = (&'static str, fn() -> Verdict);

fn verdict(pass: bool, summary: impl Into<String>) -> Verdict {
    Verdict { pass, summary: summary.into() }
}

/// Runs `property` with `trials` trials at the pinned `tolerance`.
fn run(property: Property, trials: usize, sizes: Option<Vec<usize>>, tolerance: f64) -> SuiteReport {
    let config = SuiteConfig {
        suites: vec![SuiteSpec { property, trials, sizes, tolerance: Some(tolerance) }],
        ..SuiteConfig::default_suite()
    };
    execute(&config).expect("pinned configuration is valid")
}

fn metric(o: &ExperimentOutcome, name: &str) -> f64 {
    o.metrics.get(name).copied().unwrap_or(f64::INFINITY)
}

fn max_of(outcomes: &[ExperimentOutcome], f: impl Fn(&ExperimentOutcome) -> f64) -> f64 {
    outcomes.iter().map(f).fold(0.0, f64::max)
}

fn residual(o: &ExperimentOutcome) -> f64 {
    o.residual.unwrap_or(f64::INFINITY)
}

fn failures(outcomes: &[ExperimentOutcome]) -> usize {
    outcomes.iter().filter(|o| !o.pass).count()
}

fn first_failure(outcomes: &[ExperimentOutcome]) -> String {
    outcomes
        .iter()
        .find(|o| !o.pass)
        .map(|o| format!("; first failure trial {} seed {}: {}", o.trial, o.seed, o.detail.as_deref().unwrap_or("")))
        .unwrap_or_default()
}

fn elimination_against_oracle() -> Verdict {
    let r = run(Property::EliminationOracle, 200, Some(vec![2, 3, 4]), 1e-8);
    let o = &r.outcomes;
    let worst_res = max_of(o, residual);
    let worst_ratio = max_of(o, |x| metric(x, "oracle_distance") / metric(x, "distance_bound"));
    let sizes_ok = [2, 3, 4].iter().all(|n| o.iter().any(|x| x.n == *n));
    let dims_ok = ["M_1(C)", "M_2(C)", "M_3(C)"].iter().all(|k| o.iter().any(|x| x.instance.starts_with(k)));
    verdict(
        o.len() == 200 && failures(o) == 0 && worst_res <= 1e-8 && worst_ratio <= 1.0 && sizes_ok && dims_ok,
        format!(
            "{} trials, {} failures, worst residual {worst_res:.2e}, worst distance/(1e-6(1+|T^-1|)) {worst_ratio:.2e}{}",
            o.len(),
            failures(o),
            first_failure(o)
        ),
    )
}

fn singular_corner_closure() -> Verdict {
    let r = run(Property::InterchangeClosure, 500, Some(vec![2]), 1e-6);
    let o = &r.outcomes;
    let worst = max_of(o, residual);
    let direct = o.iter().filter(|x| x.path.is_some_and(|p| p == nbinv_core::PathTag::Direct)).count();
    let limits = o.iter().filter(|x| x.path.is_some_and(|p| p == nbinv_core::PathTag::PerturbedLimit)).count();
    verdict(
        o.len() == 500 && failures(o) == 0 && worst <= 1e-6 && direct == 0,
        format!(
            "{} trials, {} failures, worst residual {worst:.2e}, {limits} via perturbed limit{}",
            o.len(),
            failures(o),
            first_failure(o)
        ),
    )
}

fn triangular_corner_identity() -> Verdict {
    let r = run(Property::TriangularIdentity, 200, Some(vec![2]), 1e-10);
    let o = &r.outcomes;
    let worst = max_of(o, residual);
    verdict(
        o.len() == 200 && failures(o) == 0 && worst <= 1e-10,
        format!(
            "{} trials, {} failures, worst |s12 + s11 t12 s22| {worst:.2e}{}",
            o.len(),
            failures(o),
            first_failure(o)
        ),
    )
}

fn radius_lift() -> Verdict {
    let r = run(Property::SrpLift, 50, Some(vec![2]), 0.05);
    let o = &r.outcomes;
    let worst = max_of(o, |x| metric(x, "discrepancy") / metric(x, "radius_oracle").max(1.0));
    verdict(
        o.len() == 50 && failures(o) == 0 && worst <= 0.05,
        format!(
            "{} trials, {} failures, worst |r_A - r_B|/max(1, r) {worst:.2e}{}",
            o.len(),
            failures(o),
            first_failure(o)
        ),
    )
}

fn symmetric_lift_and_control() -> Verdict {
    let lift = run(Property::SymmetricLift, 100, Some(vec![1, 2, 3, 4]), 1e-10);
    let control = run(Property::SymmetricControl, 20, None, 1e-10);
    let o = &lift.outcomes;
    let min_eig = o
        .iter()
        .map(|x| x.metrics.get("min_eigenvalue").copied().unwrap_or(f64::NEG_INFINITY))
        .fold(f64::INFINITY, f64::min);
    let recorded = failures(&control.outcomes);
    verdict(
        o.len() == 100 && failures(o) == 0 && min_eig >= 1.0 - 1e-10 && recorded >= 1,
        format!(
            "{} trials, {} failures, smallest eigenvalue of I + T*T {min_eig:.12}, control recorded {recorded} failures{}",
            o.len(),
            failures(o),
            first_failure(o)
        ),
    )
}

fn hermitian_pad_and_nest() -> Verdict {
    let r = run(Property::HermitianPadding, 100, Some(vec![3]), 1e-8);
    let o = &r.outcomes;
    let worst = max_of(o, |x| metric(x, "oracle_distance"));
    verdict(
        o.len() == 100 && failures(o) == 0 && worst <= 1e-8,
        format!("{} trials, {} failures, worst oracle distance {worst:.2e}{}", o.len(), failures(o), first_failure(o)),
    )
}

fn wiener_coefficients() -> Verdict {
    // Direct check of 1/(2 + e^{it}) = Σ (−1)^q e^{iqt} / 2^{q+1}.
    let d = 64;
    let shift = Wiener::monomial(d, 1, C64::new(1.0, 0.0));
    let f = Wiener::constant(d, C64::new(2.0, 0.0)).add(&shift);
    let g = Wiener::constant(d, C64::new(1.0, 0.0)).sub(&shift);
    let worst = match wiener_inverse(&f, 1e-8) {
        Ok(inv) => (0..=10i32)
            .map(|q| (inv.coefficient(q as i64) - C64::new((-1f64).powi(q) / 2f64.powi(q + 1), 0.0)).norm())
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    let refused = matches!(wiener_inverse(&g, 1e-8), Err(AlgebraError::NotInvertible(_)));
    let suite = run(Property::WienerInverse, 1, None, 1e-8);
    verdict(
        worst <= 1e-8 && refused && failures(&suite.outcomes) == 0,
        format!("worst coefficient error {worst:.2e}, 1 - e^it refused: {refused}"),
    )
}

fn kernel_operators() -> Verdict {
    let comp = run(Property::HtComposition, 100, None, 1e-12);
    let unit = run(Property::HtUnitizedInverse, 50, None, 1e-8);
    let excess = max_of(&comp.outcomes, residual);
    let res = max_of(&unit.outcomes, residual);
    let scalar = max_of(&unit.outcomes, |x| metric(x, "scalar_part_error"));
    let ratio = max_of(&unit.outcomes, |x| metric(x, "kernel_to_scalar_ratio"));
    let ok = comp.outcomes.len() == 100
        && unit.outcomes.len() == 50
        && failures(&comp.outcomes) == 0
        && failures(&unit.outcomes) == 0
        && excess <= 1e-12
        && res <= 1e-8
        && scalar <= 1e-10
        && ratio < 1.0;
    verdict(
        ok,
        format!(
            "composition excess {excess:.2e} over 100 pairs; 50 unitized inverses, worst residual {res:.2e}, \
             scalar part error {scalar:.2e}, c = 0 refused in every trial{}{}",
            first_failure(&comp.outcomes),
            first_failure(&unit.outcomes)
        ),
    )
}

fn inverse_closedness_scan() -> Verdict {
    let r = run(Property::InverseClosedScan, 1000, Some(vec![2, 3]), 1e-6);
    let o = &r.outcomes;
    let kinds = ["M_", "wiener", "unitized_ht", "swap"];
    let covered = kinds.iter().all(|k| [2, 3].iter().all(|n| o.iter().any(|x| x.instance.starts_with(k) && x.n == *n)));
    let worst = max_of(o, residual);
    verdict(
        o.len() == 1000 && failures(o) == 0 && covered,
        format!(
            "{} trials over 4 instance pairs and n in {{2, 3}}, {} failures, worst residual {worst:.2e}{}",
            o.len(),
            failures(o),
            first_failure(o)
        ),
    )
}

fn nbinv(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nbinv"))
        .args(args)
        .current_dir(dir)
        .env_remove("NBINV_SEED")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn harness_contract() -> Verdict {
    let tmp = tempfile::tempdir().expect("tempdir");
    let dir = tmp.path();

    let (default_code, _) = nbinv(dir, &["suite", "--out", "default"]);
    let summary = fs::read_to_string(dir.join("default/summary.csv")).unwrap_or_default();
    let rows: Vec<&str> = summary.lines().skip(1).collect();
    let all_rows = rows.len() == Property::ALL.len();
    let outcomes = fs::read_to_string(dir.join("default/outcomes.jsonl")).unwrap_or_default();
    let outcome_lines = outcomes.lines().count();
    let expected_lines: usize = Property::ALL.iter().map(|p| p.default_trials()).sum();

    let strict = r#"{"suites": [{"property": "symmetric_control", "trials": 20}], "strict": true}"#;
    fs::write(dir.join("strict.json"), strict).expect("write config");
    let (strict_code, _) = nbinv(dir, &["suite", "--config", "strict.json", "--out", "strict"]);

    fs::write(dir.join("bad.json"), r#"{"suites": [{"property": "srp_lift", "trials": 0}], "colour": 1}"#)
        .expect("write config");
    let (bad_code, _) = nbinv(dir, &["suite", "--config", "bad.json"]);
    fs::write(dir.join("empty.json"), r#"{"suites": []}"#).expect("write config");
    let (empty_code, _) = nbinv(dir, &["suite", "--config", "empty.json"]);

    let mut identical = 0;
    for i in 0..100u64 {
        let mut rng = rng_from_seed(0xacce_0000 + i);
        let k = 1 + (i % 3) as usize;
        let n = 1 + (i % 4) as usize;
        let t = random_matrix::<ScalarMatrix>(n, &ScalarDesc { k }, &mut rng);
        let first = matrix_to_json(&t);
        let second = AnyMatrix::from_json(&first).map(|m| m.to_json()).unwrap_or_default();
        if first == second {
            identical += 1;
        }
    }

    verdict(
        default_code == 0
            && all_rows
            && outcome_lines == expected_lines
            && strict_code == 1
            && bad_code == 2
            && empty_code == 2
            && identical == 100,
        format!(
            "default suite exit {default_code} ({} summary rows, {outcome_lines} outcomes), strict control exit \
             {strict_code}, malformed config exit {bad_code}, empty selection exit {empty_code}, \
             {identical}/100 byte-identical round trips",
            rows.len()
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("elimination matches the oracle", elimination_against_oracle),
        ("singular-corner 2x2 closure", singular_corner_closure),
        ("triangular corner identity", triangular_corner_identity),
        ("spectral radius lift", radius_lift),
        ("symmetric lift and control", symmetric_lift_and_control),
        ("hermitian padding and nesting", hermitian_pad_and_nest),
        ("wiener inversion", wiener_coefficients),
        ("kernel operators", kernel_operators),
        ("inverse-closedness scan", inverse_closedness_scan),
        ("harness contract", harness_contract),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        println!("criterion {}: {} {name}: {}", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.summary);
        if !v.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
