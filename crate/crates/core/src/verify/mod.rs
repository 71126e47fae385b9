//! Randomized experiments over the shipped instances and the suite runner.
//!
//! Every trial derives its randomness from `trial_seed(master, stream,
//! trial)`, where the stream identifies the property. Trials are therefore
//! independent of scheduling and any outcome can be recomputed from its
//! property, trial index and seed.

mod checks;
mod properties;
pub mod random;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use checks::{
    check_inverse_closed_pair, check_involution_bound, check_srp_matrix_lift, check_symmetric_lift, instance_label,
    involution_ratio, symmetric_lift_single, wiener_symbol_radius, ClosureCheck, EnginePath, LiftCheck,
};

use crate::engine::PathTag;
use crate::rng::trial_seed;
use properties::run_trial;

/// Properties exercised by the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    /// Recursive elimination agrees with the dense oracle.
    EliminationOracle,
    /// The 2×2 procedure inverts matrices with a singular corner.
    InterchangeClosure,
    /// `s12 = −s11·t12·s22` for upper-triangular 2×2 matrices.
    TriangularIdentity,
    /// Spectral radii of Wiener matrices agree in `M_n(A)` and `M_n(B)`.
    SrpLift,
    /// `I + T*T` is invertible over `M_2(C)`.
    SymmetricLift,
    /// `I + T*T` over the swap involution; failures are expected.
    SymmetricControl,
    /// The hermitian pad-and-nest path agrees with the oracle.
    HermitianPadding,
    /// Wiener inverse coefficients of `a + e^{it}`.
    WienerInverse,
    /// Hille–Tamarkin kernel norm is submultiplicative.
    HtComposition,
    /// Unitized Hille–Tamarkin inverses.
    HtUnitizedInverse,
    /// Inverses taken in `M_n(B)` are recovered in `M_n(A)`.
    InverseClosedScan,
    /// `‖T*‖ ≤ M·‖T‖` with the declared `M`.
    InvolutionBound,
}

impl Property {
    pub const ALL: [Property; 12] = [
        Property::EliminationOracle,
        Property::InterchangeClosure,
        Property::TriangularIdentity,
        Property::SrpLift,
        Property::SymmetricLift,
        Property::SymmetricControl,
        Property::HermitianPadding,
        Property::WienerInverse,
        Property::HtComposition,
        Property::HtUnitizedInverse,
        Property::InverseClosedScan,
        Property::InvolutionBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::EliminationOracle => "elimination_oracle",
            Property::InterchangeClosure => "interchange_closure",
            Property::TriangularIdentity => "triangular_identity",
            Property::SrpLift => "srp_lift",
            Property::SymmetricLift => "symmetric_lift",
            Property::SymmetricControl => "symmetric_control",
            Property::HermitianPadding => "hermitian_padding",
            Property::WienerInverse => "wiener_inverse",
            Property::HtComposition => "ht_composition",
            Property::HtUnitizedInverse => "ht_unitized_inverse",
            Property::InverseClosedScan => "inverse_closed_scan",
            Property::InvolutionBound => "involution_bound",
        }
    }

    /// Seed stream; fixed so that adding properties never reseeds old ones.
    fn stream(self) -> u64 {
        Property::ALL.iter().position(|p| *p == self).expect("listed") as u64 + 1
    }

    /// Controls pass when at least one trial fails, unless run strictly.
    pub fn is_control(self) -> bool {
        self == Property::SymmetricControl
    }

    pub fn default_trials(self) -> usize {
        match self {
            Property::EliminationOracle => 200,
            Property::InterchangeClosure => 500,
            Property::TriangularIdentity => 200,
            Property::SrpLift => 50,
            Property::SymmetricLift => 100,
            Property::SymmetricControl => 20,
            Property::HermitianPadding => 100,
            Property::WienerInverse => 1,
            Property::HtComposition => 100,
            Property::HtUnitizedInverse => 50,
            Property::InverseClosedScan => 1000,
            Property::InvolutionBound => 100,
        }
    }

    /// The tolerance the property is judged against.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Property::EliminationOracle => 1e-8,
            Property::InterchangeClosure => 1e-6,
            Property::TriangularIdentity => 1e-10,
            Property::SrpLift => 0.05,
            Property::SymmetricLift => 1e-10,
            Property::SymmetricControl => 1e-10,
            Property::HermitianPadding => 1e-8,
            Property::WienerInverse => 1e-8,
            Property::HtComposition => 1e-12,
            Property::HtUnitizedInverse => 1e-8,
            Property::InverseClosedScan => 1e-6,
            Property::InvolutionBound => 1e-12,
        }
    }

    /// Matrix sizes cycled through; `None` when the property has no size.
    pub fn default_sizes(self) -> Option<Vec<usize>> {
        match self {
            Property::EliminationOracle => Some(vec![2, 3, 4]),
            Property::InterchangeClosure | Property::TriangularIdentity | Property::SrpLift => Some(vec![2]),
            Property::SymmetricLift | Property::SymmetricControl => Some(vec![1, 2, 3, 4]),
            Property::HermitianPadding => Some(vec![3]),
            Property::InverseClosedScan => Some(vec![2, 3]),
            Property::InvolutionBound => Some(vec![1, 2]),
            Property::WienerInverse | Property::HtComposition | Property::HtUnitizedInverse => None,
        }
    }

    /// Sizes other than these are rejected.
    fn fixed_size(self) -> Option<usize> {
        match self {
            Property::InterchangeClosure | Property::TriangularIdentity => Some(2),
            _ => None,
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| ConfigError(format!("unknown property '{s}'")))
    }
}

/// One trial's record in the outcome stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentOutcome {
    pub property: Property,
    pub trial: u64,
    pub seed: u64,
    /// The `A ⊂ B` pair under test.
    pub instance: String,
    pub n: usize,
    pub pass: bool,
    /// Set for control properties, whose failures demonstrate detection.
    pub expected_failure: bool,
    /// The quantity compared against the property's tolerance.
    pub residual: Option<f64>,
    pub path: Option<PathTag>,
    pub metrics: BTreeMap<String, f64>,
    pub detail: Option<String>,
    /// Serialized inputs; always present on failures.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(ConfigError(format!("unknown format '{s}', expected json or csv"))),
        }
    }
}

/// Parameters of the instances the properties draw from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InstanceParams {
    /// `k` for `M_k(C)` entries, cycled through by the scalar properties.
    pub scalar_dims: Vec<usize>,
    /// `k` for properties stated over `M_2(C)`.
    pub block_dim: usize,
    /// Wiener degree for the spectral-radius and involution checks.
    pub wiener_degree: usize,
    /// Wiener degree for the inverse-coefficient check.
    pub wiener_inverse_degree: usize,
    /// Wiener degree in the inverse-closedness scan.
    pub scan_wiener_degree: usize,
    /// Quadrature points for the Hille–Tamarkin properties.
    pub ht_grid: usize,
    /// Quadrature points in the scan and the involution check.
    pub scan_ht_grid: usize,
    /// Largest power in the spectral-radius estimates.
    pub n_max: usize,
}

impl Default for InstanceParams {
    fn default() -> Self {
        InstanceParams {
            scalar_dims: vec![1, 2, 3],
            block_dim: 2,
            wiener_degree: 16,
            wiener_inverse_degree: 64,
            scan_wiener_degree: 8,
            ht_grid: 128,
            scan_ht_grid: 32,
            n_max: 1024,
        }
    }
}

/// One property to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    pub property: Property,
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl SuiteSpec {
    pub fn default_for(property: Property) -> Self {
        SuiteSpec { property, trials: property.default_trials(), sizes: None, tolerance: None }
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(self.property.default_tolerance())
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.sizes.clone().or(self.property.default_sizes()).unwrap_or_else(|| vec![1])
    }
}

fn default_seed() -> u64 {
    0x6e62_696e_7600
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("nbinv-out")
}

/// Everything a suite run needs. Unknown fields are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub suites: Vec<SuiteSpec>,
    /// Judge control properties like any other.
    #[serde(default)]
    pub strict: bool,
    #[serde(default)]
    pub instances: InstanceParams,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
    /// Worker threads; `None` uses every core.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig::default_suite()
    }
}

impl SuiteConfig {
    /// Every property at its default trial count.
    pub fn default_suite() -> Self {
        SuiteConfig {
            seed: default_seed(),
            suites: Property::ALL.into_iter().map(SuiteSpec::default_for).collect(),
            strict: false,
            instances: InstanceParams::default(),
            out_dir: default_out_dir(),
            format: OutputFormat::Json,
            threads: None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self, ConfigError> {
        let cfg: SuiteConfig = serde_json::from_str(s).map_err(|e| ConfigError(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError(msg));
        if self.suites.is_empty() {
            return bad("no suites selected".into());
        }
        for s in &self.suites {
            let p = s.property;
            if s.trials < 1 {
                return bad(format!("{p}: trial count must be at least 1"));
            }
            if let Some(t) = s.tolerance {
                if !(t > 0.0 && t.is_finite()) {
                    return bad(format!("{p}: tolerance must be positive, got {t}"));
                }
            }
            if let Some(sizes) = &s.sizes {
                if p.default_sizes().is_none() {
                    return bad(format!("{p}: property takes no matrix sizes"));
                }
                if sizes.is_empty() || sizes.contains(&0) {
                    return bad(format!("{p}: sizes must be non-empty and at least 1"));
                }
                if let Some(fixed) = p.fixed_size() {
                    if sizes.iter().any(|&n| n != fixed) {
                        return bad(format!("{p}: only size {fixed} is supported"));
                    }
                }
            }
        }
        let i = &self.instances;
        if i.scalar_dims.is_empty() || i.scalar_dims.contains(&0) {
            return bad("instances.scalar_dims must be non-empty and at least 1".into());
        }
        let positive = [
            ("block_dim", i.block_dim),
            ("wiener_degree", i.wiener_degree),
            ("wiener_inverse_degree", i.wiener_inverse_degree),
            ("scan_wiener_degree", i.scan_wiener_degree),
            ("ht_grid", i.ht_grid),
            ("scan_ht_grid", i.scan_ht_grid),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return bad(format!("instances.{name} must be at least 1"));
        }
        if i.n_max < 4 || !i.n_max.is_power_of_two() {
            return bad(format!("instances.n_max must be a power of two ≥ 4, got {}", i.n_max));
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        Ok(())
    }

    fn context(&self, spec: &SuiteSpec) -> TrialContext {
        TrialContext { params: self.instances.clone(), tol: spec.tolerance(), sizes: spec.sizes() }
    }

    fn spec_for(&self, property: Property) -> SuiteSpec {
        self.suites.iter().find(|s| s.property == property).cloned().unwrap_or_else(|| SuiteSpec::default_for(property))
    }

    /// Seed of trial `trial` of `property` under this configuration.
    pub fn trial_seed(&self, property: Property, trial: u64) -> u64 {
        trial_seed(self.seed, property.stream(), trial)
    }

    /// Recomputes one trial from its property, index and seed.
    pub fn replay(&self, property: Property, trial: u64, seed: u64) -> ExperimentOutcome {
        let spec = self.spec_for(property);
        run_trial(&self.context(&spec), property, trial, seed, false).outcome
    }

    /// Certificate JSON of one trial, when its property produces one.
    pub fn certificate(&self, property: Property, trial: u64, seed: u64) -> Option<String> {
        let spec = self.spec_for(property);
        run_trial(&self.context(&spec), property, trial, seed, true).certificate
    }
}

/// Shared parameters of one property's trials.
#[derive(Debug, Clone)]
pub(crate) struct TrialContext {
    pub params: InstanceParams,
    pub tol: f64,
    pub sizes: Vec<usize>,
}

/// Per-property line of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub property: Property,
    pub trials: usize,
    pub passes: usize,
    /// Largest residual; failures without a residual count as infinite.
    pub worst_residual: f64,
    pub seed_of_worst: u64,
    #[serde(skip)]
    pub trial_of_worst: u64,
    #[serde(skip)]
    pub verdict: bool,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub rows: Vec<SummaryRow>,
    pub outcomes: Vec<ExperimentOutcome>,
    pub strict: bool,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.verdict)
    }

    /// 0 when every property holds, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    /// Failures that count against the run, with their replay coordinates.
    pub fn counted_failures(&self) -> Vec<&ExperimentOutcome> {
        self.outcomes.iter().filter(|o| !o.pass && (self.strict || !o.expected_failure)).collect()
    }

    pub fn summary_csv(&self) -> Result<String, SuiteError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| SuiteError::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn summary_json(&self) -> Result<String, SuiteError> {
        let rows: Vec<_> = self
            .rows
            .iter()
            .map(|r| {
                serde_json::json!({
                    "property": r.property,
                    "trials": r.trials,
                    "passes": r.passes,
                    "worst_residual": r.worst_residual.is_finite().then_some(r.worst_residual),
                    "seed_of_worst": r.seed_of_worst,
                    "trial_of_worst": r.trial_of_worst,
                    "verdict": if r.verdict { "pass" } else { "fail" },
                })
            })
            .collect();
        Ok(serde_json::to_string_pretty(&serde_json::json!({ "passed": self.passed(), "properties": rows }))?)
    }
}

/// `(residual, seed, trial)` of the worst trial; failures rank above passes.
fn worst_of(outcomes: &[ExperimentOutcome]) -> (f64, u64, u64) {
    let value = |o: &ExperimentOutcome| o.residual.unwrap_or(if o.pass { 0.0 } else { f64::INFINITY });
    outcomes
        .iter()
        .max_by(|a, b| (!a.pass).cmp(&!b.pass).then(value(a).total_cmp(&value(b))))
        .map(|o| (value(o), o.seed, o.trial))
        .unwrap_or((0.0, 0, 0))
}

fn summarize(spec: &SuiteSpec, outcomes: &[ExperimentOutcome], strict: bool) -> SummaryRow {
    let passes = outcomes.iter().filter(|o| o.pass).count();
    let trials = outcomes.len();
    let (worst_residual, seed_of_worst, trial_of_worst) = worst_of(outcomes);
    let verdict = if spec.property.is_control() && !strict { passes < trials } else { passes == trials };
    SummaryRow { property: spec.property, trials, passes, worst_residual, seed_of_worst, trial_of_worst, verdict }
}

/// Runs every selected property without touching the filesystem.
pub fn execute(config: &SuiteConfig) -> Result<SuiteReport, SuiteError> {
    config.validate()?;
    let run = || {
        let mut rows = Vec::new();
        let mut all = Vec::new();
        for spec in &config.suites {
            let ctx = config.context(spec);
            let outcomes: Vec<ExperimentOutcome> = (0..spec.trials as u64)
                .into_par_iter()
                .map(|i| run_trial(&ctx, spec.property, i, config.trial_seed(spec.property, i), false).outcome)
                .collect();
            rows.push(summarize(spec, &outcomes, config.strict));
            all.extend(outcomes);
        }
        SuiteReport { rows, outcomes: all, strict: config.strict }
    };
    match config.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| ConfigError(format!("cannot start {t} worker threads: {e}")))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

/// Failures beyond this many per property get no certificate file.
const CERTIFICATES_PER_PROPERTY: usize = 16;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SuiteError + '_ {
    move |source| SuiteError::Io { path: path.to_path_buf(), source }
}

/// Writes `outcomes.jsonl`, `summary.csv` and `certificates/*.json` under
/// `dir`. Everything is staged in a sibling directory first and moved into
/// place once complete.
pub fn write_artifacts(config: &SuiteConfig, report: &SuiteReport, dir: &Path) -> Result<(), SuiteError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let staging = dir.join(format!(".staging-{}", std::process::id()));
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(io_err(&staging))?;
    }
    let certs = staging.join("certificates");
    fs::create_dir_all(&certs).map_err(io_err(&certs))?;

    let mut lines = Vec::new();
    for o in &report.outcomes {
        serde_json::to_writer(&mut lines, o)?;
        lines.push(b'\n');
    }
    let outcomes_path = staging.join("outcomes.jsonl");
    fs::write(&outcomes_path, lines).map_err(io_err(&outcomes_path))?;
    let summary_path = staging.join("summary.csv");
    fs::write(&summary_path, report.summary_csv()?).map_err(io_err(&summary_path))?;

    for row in &report.rows {
        let mut wanted: Vec<(u64, u64)> = report
            .outcomes
            .iter()
            .filter(|o| o.property == row.property && !o.pass)
            .take(CERTIFICATES_PER_PROPERTY)
            .map(|o| (o.trial, o.seed))
            .collect();
        if !wanted.iter().any(|&(t, _)| t == row.trial_of_worst) {
            wanted.push((row.trial_of_worst, row.seed_of_worst));
        }
        for (trial, seed) in wanted {
            if let Some(cert) = config.certificate(row.property, trial, seed) {
                let path = certs.join(format!("{}-{trial:04}.json", row.property));
                let mut f = fs::File::create(&path).map_err(io_err(&path))?;
                f.write_all(cert.as_bytes()).map_err(io_err(&path))?;
            }
        }
    }

    for name in ["outcomes.jsonl", "summary.csv", "certificates"] {
        let target = dir.join(name);
        if target.is_dir() {
            fs::remove_dir_all(&target).map_err(io_err(&target))?;
        }
        fs::rename(staging.join(name), &target).map_err(io_err(&target))?;
    }
    fs::remove_dir_all(&staging).map_err(io_err(&staging))?;
    Ok(())
}

/// Executes the configured suites and writes their artifacts to
/// `config.out_dir`.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport, SuiteError> {
    let report = execute(config)?;
    write_artifacts(config, &report, &config.out_dir)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(property: Property, trials: usize) -> SuiteConfig {
        SuiteConfig { suites: vec![SuiteSpec { trials, ..SuiteSpec::default_for(property) }], ..SuiteConfig::default() }
    }

    #[test]
    fn config_rejects_bad_input() {
        assert!(SuiteConfig::from_json(r#"{"suites": []}"#).is_err());
        assert!(SuiteConfig::from_json(r#"{"suites": [{"property": "srp_lift", "trials": 0}]}"#).is_err());
        assert!(
            SuiteConfig::from_json(r#"{"suites": [{"property": "srp_lift", "trials": 1, "tolerance": 0}]}"#).is_err()
        );
        assert!(SuiteConfig::from_json(r#"{"suites": [{"property": "srp_lift", "trials": 1, "sizes": [0]}]}"#).is_err());
        assert!(SuiteConfig::from_json(r#"{"suites": [{"property": "srp_lift", "trials": 1}], "colour": 1}"#).is_err());
        assert!(SuiteConfig::from_json(
            r#"{"suites": [{"property": "interchange_closure", "trials": 1, "sizes": [3]}]}"#
        )
        .is_err());
        let ok = SuiteConfig::from_json(r#"{"suites": [{"property": "srp_lift", "trials": 2}], "seed": 7}"#).unwrap();
        assert_eq!(ok.seed, 7);
        assert_eq!(ok.instances, InstanceParams::default());
    }

    #[test]
    fn outcomes_do_not_depend_on_thread_count() {
        let mut cfg = small(Property::EliminationOracle, 12);
        cfg.threads = Some(1);
        let a = execute(&cfg).unwrap();
        cfg.threads = Some(4);
        let b = execute(&cfg).unwrap();
        assert_eq!(a.outcomes, b.outcomes);
        assert!(a.passed());
    }

    #[test]
    fn control_failure_replays_identically() {
        let cfg = small(Property::SymmetricControl, 10);
        let report = execute(&cfg).unwrap();
        assert!(report.passed(), "non-strict control passes by failing");
        let failure = report.outcomes.iter().find(|o| !o.pass).expect("witness trial fails");
        assert!(failure.input.is_some());
        assert_eq!(&cfg.replay(failure.property, failure.trial, failure.seed), failure);
        let strict = SuiteConfig { strict: true, ..cfg };
        assert_eq!(execute(&strict).unwrap().exit_code(), 1);
    }

    #[test]
    fn artifacts_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(Property::InterchangeClosure, 4);
        let report = execute(&cfg).unwrap();
        assert!(report.passed(), "{:#?}", report.outcomes);
        write_artifacts(&cfg, &report, dir.path()).unwrap();
        let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert!(summary.starts_with("property,trials,passes,worst_residual,seed_of_worst\n"));
        let lines = fs::read_to_string(dir.path().join("outcomes.jsonl")).unwrap();
        assert_eq!(lines.lines().count(), 4);
        assert!(fs::read_dir(dir.path().join("certificates")).unwrap().count() >= 1);
    }
}
