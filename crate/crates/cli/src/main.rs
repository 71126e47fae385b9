//! `nbinv`: invert matrices over the shipped Banach algebras and run the
//! randomized experiment suites.
//!
//! Exit status: 0 when everything holds, 1 when an inversion or a property
//! fails, 2 on usage, parse, configuration or i/o errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nbinv_core::engine::invert_with;
use nbinv_core::serial::{certificate_to_json, AnyMatrix, Payload};
use nbinv_core::verify::{
    check_srp_matrix_lift, run_suite, OutputFormat, Property, SuiteConfig, SuiteReport, SuiteSpec,
};
use nbinv_core::{AlgebraError, Embedded, Matrix, Method, PivotStrategy};

#[derive(Debug, Parser)]
#[command(name = "nbinv", version, about = "Constructive inversion of matrices over Banach algebras")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Suite configuration (JSON). Without it the default suite is used.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed; overrides the configuration's seed.
    #[arg(long, global = true, env = "NBINV_SEED", value_name = "U64")]
    seed: Option<u64>,
    /// Residual tolerance [invert default: 1e-8; suites: per-property defaults].
    #[arg(long, global = true, value_name = "REAL")]
    tol: Option<f64>,
    /// Inversion method: triangular, prop4, thm6, hermitian or oracle [default: thm6].
    #[arg(long, global = true, value_name = "NAME")]
    method: Option<Method>,
    /// Output directory [default: the configuration's out_dir, else nbinv-out].
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Format of reports printed to stdout: json or csv [default: json].
    #[arg(long, global = true, value_name = "FORMAT")]
    format: Option<OutputFormat>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Invert the matrix in FILE and write certificate.json to the output directory.
    Invert { file: PathBuf },
    /// Estimate the spectral radius of the matrix in FILE in M_n(A) and M_n(B).
    Radius {
        file: PathBuf,
        /// Largest power N in the estimate; a power of two, at least 4.
        #[arg(long, default_value_t = 1024)]
        n_max: usize,
    },
    /// Run the spectral-radius lift experiment.
    Srp,
    /// Run the symmetric-lift experiment and its non-symmetric control.
    Symmetry {
        /// Count the control's expected failures as failures.
        #[arg(long)]
        strict: bool,
    },
    /// Run the configured experiment suites.
    Suite {
        /// Count control failures as failures.
        #[arg(long)]
        strict: bool,
        /// Worker threads [default: all cores].
        #[arg(long)]
        threads: Option<usize>,
        /// Recompute one trial, given as PROPERTY:TRIAL, and print its outcome.
        #[arg(long, value_name = "PROPERTY:TRIAL")]
        replay: Option<String>,
    },
}

/// A terminal condition with its exit status.
struct Exit {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Exit {
    Exit { code: 2, message: message.into() }
}

fn failure(message: impl Into<String>) -> Exit {
    Exit { code: 1, message: message.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Invert { file } => invert(&cli.global, file),
        Command::Radius { file, n_max } => radius(&cli.global, file, *n_max),
        Command::Srp => suites(&cli.global, &[Property::SrpLift], false, None),
        Command::Symmetry { strict } => {
            suites(&cli.global, &[Property::SymmetricLift, Property::SymmetricControl], *strict, None)
        }
        Command::Suite { strict, threads, replay } => match replay {
            Some(spec) => replay_trial(&cli.global, spec, *strict),
            None => suites(&cli.global, &[], *strict, *threads),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !e.message.is_empty() {
                eprintln!("error: {}", e.message);
            }
            ExitCode::from(e.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Exit> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> Result<AnyMatrix, Exit> {
    AnyMatrix::from_json(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn invert(g: &Global, file: &Path) -> Result<(), Exit> {
    let m = load_matrix(file)?;
    let method = g.method.unwrap_or(Method::Thm6);
    let tol = g.tol.unwrap_or(1e-8);
    if tol.is_nan() || tol <= 0.0 {
        return Err(usage("--tol must be positive"));
    }
    let strategy = PivotStrategy { seed: g.seed.unwrap_or(PivotStrategy::default().seed), ..Default::default() };
    let out = g.out.clone().unwrap_or_else(|| PathBuf::from("nbinv-out"));
    match m {
        AnyMatrix::Scalar(t) => invert_typed(&t, method, &strategy, tol, &out),
        AnyMatrix::Wiener(t) => invert_typed(&t, method, &strategy, tol, &out),
        AnyMatrix::HilleTamarkin(t) => invert_typed(&t, method, &strategy, tol, &out),
        AnyMatrix::Swap(t) => invert_typed(&t, method, &strategy, tol, &out),
    }
}

fn invert_typed<A: Payload>(
    t: &Matrix<A>,
    method: Method,
    strategy: &PivotStrategy,
    tol: f64,
    out: &Path,
) -> Result<(), Exit> {
    let cert = invert_with(method, t, strategy, tol).map_err(|e| failure(e.to_string()))?;
    let path = out.join("certificate.json");
    write(&path, &certificate_to_json(&cert))?;
    println!("method          {}", cert.method);
    println!("path            {}", cert.path);
    println!("residual_left   {:e}", cert.residual_left);
    println!("residual_right  {:e}", cert.residual_right);
    if let Some(size) = cert.padded_to {
        println!("padded_to       {size}");
        println!("nest_levels     {}", cert.nest_levels);
    }
    if cert.limit_terms > 0 {
        println!("limit_terms     {}", cert.limit_terms);
    }
    if method == Method::Triangular && t.n() == 2 {
        // For upper-triangular T the corner of T⁻¹ is −s11·t12·s22.
        let s = &cert.inverse;
        let product = s.get(0, 0).mul(t.get(0, 1)).mul(s.get(1, 1)).neg();
        let defect = s.get(0, 1).sub(&product).norm();
        println!("s12             norm {:e}", s.get(0, 1).norm());
        println!("-s11*t12*s22    norm {:e}", product.norm());
        println!("s12 + s11*t12*s22 = {defect:e}");
    }
    println!("certificate     {}", path.display());
    Ok(())
}

fn radius(g: &Global, file: &Path, n_max: usize) -> Result<(), Exit> {
    let m = load_matrix(file)?;
    match m {
        AnyMatrix::Scalar(t) => radius_typed(g, &t, n_max),
        AnyMatrix::Wiener(t) => radius_typed(g, &t, n_max),
        AnyMatrix::HilleTamarkin(t) => radius_typed(g, &t, n_max),
        AnyMatrix::Swap(t) => radius_typed(g, &t, n_max),
    }
}

fn radius_typed<A: Embedded>(g: &Global, t: &Matrix<A>, n_max: usize) -> Result<(), Exit> {
    let report = check_srp_matrix_lift(t, n_max).map_err(|e| match e {
        AlgebraError::BadPowerCount(_) => usage(e.to_string()),
        other => failure(other.to_string()),
    })?;
    match g.format.unwrap_or_default() {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
        OutputFormat::Csv => {
            println!("radius_a,radius_b,discrepancy,converged");
            let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
            println!("{:e},{},{},{}", report.radius_a, opt(report.radius_b), opt(report.discrepancy), report.converged);
        }
    }
    Ok(())
}

/// The configuration after flags: `--seed` (or `NBINV_SEED`) beats the file.
fn load_config(g: &Global) -> Result<SuiteConfig, Exit> {
    let mut config = match &g.config {
        Some(path) => SuiteConfig::from_json(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?,
        None => SuiteConfig::default_suite(),
    };
    if let Some(seed) = g.seed {
        config.seed = seed;
    }
    if let Some(out) = &g.out {
        config.out_dir = out.clone();
    }
    if let Some(format) = g.format {
        config.format = format;
    }
    if let Some(tol) = g.tol {
        for s in &mut config.suites {
            s.tolerance = Some(tol);
        }
    }
    Ok(config)
}

/// Runs the configuration, restricted to `only` when non-empty. Properties
/// in `only` missing from the configuration run with their defaults.
fn suites(g: &Global, only: &[Property], strict: bool, threads: Option<usize>) -> Result<(), Exit> {
    let mut config = load_config(g)?;
    if !only.is_empty() {
        config.suites = only
            .iter()
            .map(|&p| {
                let configured = config.suites.iter().find(|s| s.property == p).cloned();
                configured.unwrap_or_else(|| SuiteSpec::default_for(p))
            })
            .collect();
    }
    config.strict |= strict;
    if threads.is_some() {
        config.threads = threads;
    }
    let report = run_suite(&config).map_err(|e| usage(e.to_string()))?;
    print_report(&config, &report)?;
    if report.passed() {
        Ok(())
    } else {
        Err(failure(""))
    }
}

fn print_report(config: &SuiteConfig, report: &SuiteReport) -> Result<(), Exit> {
    let text = match config.format {
        OutputFormat::Json => report.summary_json(),
        OutputFormat::Csv => report.summary_csv(),
    }
    .map_err(|e| usage(e.to_string()))?;
    println!("{}", text.trim_end());
    for o in report.counted_failures() {
        let detail = o.detail.as_deref().unwrap_or("no detail");
        eprintln!(
            "FAILURE property={} trial={} seed={} instance=\"{}\" n={}: {detail}",
            o.property, o.trial, o.seed, o.instance, o.n
        );
        if o.property == Property::InverseClosedScan {
            eprintln!(
                "!!! inverse-closedness check failed on a valid instance pair; this is either a numerical \
                 defect or a counterexample. Replay with: nbinv suite --seed {} --replay {}:{}",
                config.seed, o.property, o.trial
            );
        }
    }
    eprintln!("artifacts written to {}", config.out_dir.display());
    Ok(())
}

fn replay_trial(g: &Global, spec: &str, strict: bool) -> Result<(), Exit> {
    let mut config = load_config(g)?;
    config.strict |= strict;
    config.validate().map_err(|e| usage(e.to_string()))?;
    let (property, trial) = spec.split_once(':').ok_or_else(|| usage("--replay expects PROPERTY:TRIAL"))?;
    let property: Property = property.parse().map_err(|e: nbinv_core::verify::ConfigError| usage(e.to_string()))?;
    let trial: u64 = trial.parse().map_err(|e| usage(format!("trial index: {e}")))?;
    let seed = config.trial_seed(property, trial);
    let outcome = config.replay(property, trial, seed);
    println!("{}", serde_json::to_string_pretty(&outcome).expect("outcome serializes"));
    if outcome.pass || (outcome.expected_failure && !config.strict) {
        Ok(())
    } else {
        Err(failure(format!("trial {trial} of {property} fails")))
    }
}
