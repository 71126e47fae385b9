//! One randomized trial per call, for every property in the suite.

use std::collections::BTreeMap;

use rand::{Rng, RngCore};
use serde_json::json;

use super::checks::{
    check_inverse_closed_pair, check_srp_matrix_lift, instance_label, involution_ratio, matrix_value,
    symmetric_lift_single, wiener_symbol_radius, EnginePath,
};
use super::random::{
    dense_is_invertible, random_hermitian_invertible, random_invertible, random_matrix, random_singular_corner,
    random_upper_triangular, shift_to_invertible,
};
use super::{ExperimentOutcome, Property, TrialContext};
use crate::algebra::{two_sided_residual, BanachAlgebra, Embedded};
use crate::engine::{
    dense_inverse_partial_pivoting, invert_hermitian_symmetric, invert_upper_triangular, oracle_invert,
    prop4_invert_2x2, thm6_invert, triangular_certificate, InessentialMask, PathTag, PivotStrategy,
};
use crate::error::{AlgebraError, EngineError};
use crate::instances::{
    ht_compose, ht_unitized_inverse, wiener_inverse, HtDesc, HtKernel, ScalarDesc, ScalarMatrix, SwapDesc, SwapPair,
    UnitizedHt, Wiener, WienerDesc,
};
use crate::matrix::{flatten, pad_matrix, Matrix};
use crate::rng::{gaussian, rng_from_seed};
use crate::serial::{certificate_to_json, Payload};
use crate::{DenseMatrix, C64};

/// Engine residual accepted for the oracle distance bound `1e-6·(1 + ‖T⁻¹‖)`.
const ORACLE_DISTANCE: f64 = 1e-6;
/// Bound on `‖replay − reduced‖` for recorded certificates.
const REPLAY_TOL: f64 = 1e-10;
/// Relative singular-value threshold separating invertible from singular.
const RANK_THRESHOLD: f64 = 1e-10;
/// Scalar part of a unitized inverse must equal `c⁻¹` to this accuracy.
const SCALAR_PART_TOL: f64 = 1e-10;
/// Accuracy required of the oracle inverse of `I + T*T`.
const LIFT_ORACLE_TOL: f64 = 1e-8;

pub(crate) struct TrialResult {
    pub outcome: ExperimentOutcome,
    pub certificate: Option<String>,
}

/// Accumulates one outcome.
struct Record {
    outcome: ExperimentOutcome,
    certificate: Option<String>,
    want_certificate: bool,
}

impl Record {
    fn new(property: Property, trial: u64, seed: u64, instance: String, n: usize, want_certificate: bool) -> Self {
        Record {
            outcome: ExperimentOutcome {
                property,
                trial,
                seed,
                instance,
                n,
                pass: false,
                expected_failure: property.is_control(),
                residual: None,
                path: None,
                metrics: BTreeMap::new(),
                detail: None,
                input: None,
            },
            certificate: None,
            want_certificate,
        }
    }

    fn metric(&mut self, name: &str, v: f64) {
        if v.is_finite() {
            self.outcome.metrics.insert(name.into(), v);
        }
    }

    fn certificate(&mut self, make: impl FnOnce() -> String) {
        if self.want_certificate {
            self.certificate = Some(make());
        }
    }

    /// Failing outcomes always carry their input.
    fn finish(
        mut self,
        pass: bool,
        residual: Option<f64>,
        detail: Option<String>,
        input: impl FnOnce() -> serde_json::Value,
    ) -> TrialResult {
        self.outcome.pass = pass;
        self.outcome.residual = residual.filter(|r| r.is_finite());
        self.outcome.detail = detail;
        if !pass {
            self.outcome.input = Some(input());
        }
        TrialResult { outcome: self.outcome, certificate: self.certificate }
    }
}

fn pick<T: Copy>(xs: &[T], i: u64) -> T {
    xs[(i % xs.len() as u64) as usize]
}

fn strategy(seed: u64) -> PivotStrategy {
    PivotStrategy { seed, ..PivotStrategy::default() }
}

fn dist<A: BanachAlgebra>(x: &Matrix<A>, y: &Matrix<A>) -> f64 {
    x.try_sub(y).map(|d| d.mat_norm()).unwrap_or(f64::INFINITY)
}

/// First failing condition, if any.
fn first_failure(checks: &[(bool, String)]) -> Option<String> {
    checks.iter().find(|(ok, _)| !ok).map(|(_, why)| why.clone())
}

pub(crate) fn run_trial(ctx: &TrialContext, property: Property, trial: u64, seed: u64, want: bool) -> TrialResult {
    let mut rng = rng_from_seed(seed);
    let rec = |instance: String, n: usize| Record::new(property, trial, seed, instance, n, want);
    match property {
        Property::EliminationOracle => elimination_oracle(ctx, trial, seed, &mut rng, rec),
        Property::InterchangeClosure => interchange_closure(ctx, trial, seed, &mut rng, rec),
        Property::TriangularIdentity => triangular_identity(ctx, trial, seed, &mut rng, rec),
        Property::SrpLift => srp_lift(ctx, trial, &mut rng, rec),
        Property::SymmetricLift => symmetric_lift(ctx, trial, seed, &mut rng, rec),
        Property::SymmetricControl => symmetric_control(ctx, trial, &mut rng, rec),
        Property::HermitianPadding => hermitian_padding(ctx, trial, seed, &mut rng, rec),
        Property::WienerInverse => wiener_inversion(ctx, trial, rec),
        Property::HtComposition => ht_composition(ctx, &mut rng, rec),
        Property::HtUnitizedInverse => ht_unitized(ctx, &mut rng, rec),
        Property::InverseClosedScan => inverse_closed_scan(ctx, trial, seed, &mut rng, rec),
        Property::InvolutionBound => involution_bound(ctx, trial, &mut rng, rec),
    }
}

fn elimination_oracle(
    ctx: &TrialContext,
    trial: u64,
    seed: u64,
    rng: &mut dyn RngCore,
    rec: impl Fn(String, usize) -> Record,
) -> TrialResult {
    let n = pick(&ctx.sizes, trial);
    let k = pick(&ctx.params.scalar_dims, trial / ctx.sizes.len() as u64);
    let desc = ScalarDesc { k };
    let t = random_invertible::<ScalarMatrix>(n, &desc, rng);
    let mut r = rec(instance_label::<ScalarMatrix>(&desc), n);
    let input = || matrix_value(&t);
    let oracle = match oracle_invert(&t) {
        Ok(o) => o,
        Err(e) => return r.finish(false, None, Some(format!("oracle: {e}")), input),
    };
    let cert = match thm6_invert(&t, &InessentialMask::below_diagonal(n), &strategy(seed), ctx.tol) {
        Ok(c) => c,
        Err(e) => return r.finish(false, None, Some(format!("engine: {e}")), input),
    };
    let distance = dist(&cert.inverse, &oracle);
    let bound = ORACLE_DISTANCE * (1.0 + oracle.mat_norm());
    let replay = cert.replay_error().unwrap_or(f64::INFINITY);
    r.metric("oracle_distance", distance);
    r.metric("distance_bound", bound);
    r.metric("replay_error", replay);
    r.metric("limit_terms", cert.limit_terms as f64);
    r.outcome.path = Some(cert.path);
    r.certificate(|| certificate_to_json(&cert));
    let residual = cert.residual();
    let failure = first_failure(&[
        (residual <= ctx.tol, format!("residual {residual:e}")),
        (distance <= bound, format!("oracle distance {distance:e} exceeds {bound:e}")),
        (replay <= REPLAY_TOL, format!("replay error {replay:e}")),
    ]);
    r.finish(failure.is_none(), Some(residual), failure, input)
}

fn interchange_closure(
    ctx: &TrialContext,
    trial: u64,
    seed: u64,
    rng: &mut dyn RngCore,
    rec: impl Fn(String, usize) -> Record,
) -> TrialResult {
    let k = ctx.params.block_dim;
    // Every fourth trial has no invertible entry at all.
    let all_singular = trial % 4 == 3;
    let t = random_singular_corner(k, all_singular, rng);
    let mut r = rec(instance_label::<ScalarMatrix>(&ScalarDesc { k }), 2);
    let input = || matrix_value(&t);
    let oracle = match oracle_invert(&t) {
        Ok(o) => o,
        Err(e) => return r.finish(false, None, Some(format!("oracle: {e}")), input),
    };
    let cert = match prop4_invert_2x2(&t, &strategy(seed), ctx.tol) {
        Ok(c) => c,
        Err(e) => return r.finish(false, None, Some(format!("engine: {e}")), input),
    };
    let distance = dist(&cert.inverse, &oracle);
    let bound = ctx.tol * (1.0 + oracle.mat_norm());
    let replay = cert.replay_error().unwrap_or(f64::INFINITY);
    r.metric("oracle_distance", distance);
    r.metric("replay_error", replay);
    r.metric("limit_terms", cert.limit_terms as f64);
    r.outcome.path = Some(cert.path);
    r.certificate(|| certificate_to_json(&cert));
    let residual = cert.residual();
    let failure = first_failure(&[
        (residual <= ctx.tol, format!("residual {residual:e}")),
        (cert.path != PathTag::Direct, "singular corner reported a direct path".into()),
        (distance <= bound, format!("oracle distance {distance:e} exceeds {bound:e}")),
        (replay <= REPLAY_TOL, format!("replay error {replay:e}")),
    ]);
    r.finish(failure.is_none(), Some(residual), failure, input)
}

fn triangular_identity(
    ctx: &TrialContext,
    trial: u64,
    seed: u64,
    rng: &mut dyn RngCore,
    rec: impl Fn(String, usize) -> Record,
) -> TrialResult {
    let k = pick(&ctx.params.scalar_dims, trial);
    let t = random_upper_triangular(2, k, 0.25, rng);
    let mut r = rec(instance_label::<ScalarMatrix>(&ScalarDesc { k }), 2);
    let input = || matrix_value(&t);
    let inv = |a: &ScalarMatrix| -> Result<ScalarMatrix, EngineError> { Ok(a.inverse(1e-12)?) };
    let s = match invert_upper_triangular(&t, &inv) {
        Ok(s) => s,
        Err(e) => return r.finish(false, None, Some(format!("engine: {e}")), input),
    };
    let predicted = s.get(0, 0).mul(t.get(0, 1)).mul(s.get(1, 1));
    let defect = s.get(0, 1).add(&predicted).norm();
    let below = s.get(1, 0).norm();
    r.metric("below_diagonal", below);
    if let Ok(c) = triangular_certificate(&t, &strategy(seed), 1.0) {
        r.metric("residual", c.residual());
        r.certificate(|| certificate_to_json(&c));
    }
    let failure = first_failure(&[
        (defect <= ctx.tol, format!("‖s12 + s11·t12·s22‖ = {defect:e}")),
        (below == 0.0, format!("inverse has below-diagonal entry of norm {below:e}")),
    ]);
    r.finish(failure.is_none(), Some(defect), failure, input)
}

fn srp_lift(
    ctx: &TrialContext,
    trial: u64,
    rng: &mut dyn RngCore,
    rec: impl Fn(String, usize) -> Record,
) -> TrialResult {
    let n = pick(&ctx.sizes, trial);
    let desc = WienerDesc { degree: ctx.params.wiener_degree };
    let t = random_matrix::<Wiener>(n, &desc, rng);
    let mut r = rec(instance_label::<Wiener>(&desc), n);
    let input = || matrix_value(&t);
    let report = match check_srp_matrix_lift(&t, ctx.params.n_max) {
        Ok(rep) => rep,
        Err(e) => return r.finish(false, None, Some(e.to_string()), input),
    };
    let rb = report.radius_b.unwrap_or(f64::NAN);
    let oracle = if n == 2 { wiener_symbol_radius(&t) } else { rb };
    let discrepancy = report.discrepancy.unwrap_or(f64::INFINITY);
    let scale = oracle.max(1.0);
    r.metric("radius_a", report.radius_a);
    r.metric("radius_b", rb);
    r.metric("radius_oracle", oracle);
    r.metric("oracle_gap_b", (rb - oracle).abs());
    r.metric("discrepancy", discrepancy);
    let failure = first_failure(&[(
        discrepancy <= ctx.tol * scale,
        format!("|r_A − r_B| = {discrepancy:e} exceeds {:e}", ctx.tol * scale),
    )]);
    r.finish(failure.is_none(), Some(discrepancy / scale), failure, input)
}

fn symmetric_lift(
    ctx: &TrialContext,
    trial: u64,
    seed: u64,
    rng: &mut dyn RngCore,
    rec: impl Fn(String, usize) -> Record,
) -> TrialResult {
    let n = pick(&ctx.sizes, trial);
    let desc = ScalarDesc { k: ctx.params.block_dim };
    let t = random_matrix::<ScalarMatrix>(n, &desc, rng);
    let mut r = rec(instance_label::<ScalarMatrix>(&desc), n);
    let input = || matrix_value(&t);
    let check = match symmetric_lift_single(&t, ctx.tol) {
        Ok(c) => c,
        Err(e) => return r.finish(false, None, Some(e.to_string()), input),
    };
    if let Some(l) = check.min_eigenvalue {
        r.metric("min_eigenvalue", l);
    }
    let s = Matrix::identity(n, &desc).try_add(&t.star_matrix().expect("involution").try_mul(&t).expect("shape"));
    let engine =
        s.map_err(EngineError::from).and_then(|s| invert_hermitian_symmetric(&s, &strategy(seed), LIFT_ORACLE_TOL));
    let engine_ok = match &engine {
        Ok(c) => {
            r.metric("engine_residual", c.residual());
            r.certificate(|| certificate_to_json(c));
            true
        }
        Err(_) => false,
    };
    let failure = check.detail.clone().or_else(|| {
        first_failure(&[(
            engine_ok,
            format!("hermitian engine: {}", engine.as_ref().err().map(|e| e.to_string()).unwrap_or_default()),
        )])
    });
    r.finish(check.pass && engine_ok, check.residual, failure, input)
}

fn symmetric_control(
    ctx: &TrialContext,
    trial: u64,
    rng: &mut dyn RngCore,
    rec: impl Fn(String, usize) -> Record,
) -> TrialResult {
    let n = pick(&ctx.sizes, trial);
    let t = if trial.is_multiple_of(10) {
        let w = SwapPair::witness();
        Matrix::from_fn(n, &SwapDesc, |j, k| if j == k { w } else { SwapPair::zero(&SwapDesc) })
    } else {
        random_matrix::<SwapPair>(n, &SwapDesc, rng)
    };
    let r = rec(instance_label::<SwapPair>(&SwapDesc), n);
    let input = || matrix_value(&t);
    match symmetric_lift_single(&t, ctx.tol) {
        Ok(c) => r.finish(c.pass, c.residual, c.detail, input),
        Err(e) => r.finish(false, None, Some(e.to_string()), input),
    }
}

fn hermitian_padding(
    ctx: &TrialContext,
    trial: u64,
    seed: u64,
    rng: &mut dyn RngCore,
    rec: impl Fn(String, usize) -> Record,
) -> TrialResult {
    let n = pick(&ctx.sizes, trial);
    let desc = ScalarDesc { k: ctx.params.block_dim };
    let h = random_hermitian_invertible::<ScalarMatrix>(n, &desc, rng).expect("scalar matrices carry an involution");
    let mut r = rec(instance_label::<ScalarMatrix>(&desc), n);
    let input = || matrix_value(&h);
    let size = n.next_power_of_two();
    let levels = size.trailing_zeros().saturating_sub(1) as usize;
    let oracle = match oracle_invert(&h) {
        Ok(o) => o,
        Err(e) => return r.finish(false, None, Some(format!("oracle: {e}")), input),
    };
    let cert = match invert_hermitian_symmetric(&h, &strategy(seed), ctx.tol) {
        Ok(c) => c,
        Err(e) => return r.finish(false, None, Some(format!("engine: {e}")), input),
    };
    let distance = dist(&cert.inverse, &oracle);
    r.metric("oracle_distance", distance);
    r.metric("replay_error", cert.replay_error().unwrap_or(f64::INFINITY));
    r.outcome.path = Some(cert.path);
    r.certificate(|| certificate_to_json(&cert));

    // Padding must neither create nor destroy invertibility: check on `H`
    // and on the singular `H − μI`, `μ` the eigenvalue of `H` nearest zero.
    let pads_agree = |m: &Matrix<ScalarMatrix>| -> Option<(bool, bool)> {
        let before = dense_is_invertible(&flatten(m)?, RANK_THRESHOLD);
        let after = dense_is_invertible(&flatten(&pad_matrix(m, size).ok()?)?, RANK_THRESHOLD);
        Some((before, after))
    };
    let flat = flatten(&h).expect("scalar-backed");
    let eig = flat.symmetric_eigenvalues();
    let mu = eig.iter().copied().min_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(0.0);
    let singular = h.try_sub(&Matrix::identity(n, &desc).scale(C64::new(mu, 0.0))).expect("shape");
    let invertible_case = pads_agree(&h);
    let singular_case = pads_agree(&singular);
    let failure = first_failure(&[
        (cert.residual() <= ctx.tol, format!("residual {:e}", cert.residual())),
        (distance <= ctx.tol, format!("oracle distance {distance:e}")),
        (cert.padded_to == (size != n).then_some(size), format!("padded_to {:?}", cert.padded_to)),
        (cert.nest_levels == levels, format!("nest_levels {}", cert.nest_levels)),
        (invertible_case == Some((true, true)), format!("padding of H: {invertible_case:?}")),
        (singular_case == Some((false, false)), format!("padding of H − μI: {singular_case:?}")),
    ]);
    r.finish(failure.is_none(), Some(cert.residual()), failure, input)
}

/// `f = a + e^{it}` with `a = 2 + trial`; `1/f` has coefficients
/// `(−1)^q / a^{q+1}` for `q ≥ 0`. `1 − e^{it}` vanishes at `t = 0`.
fn wiener_inversion(ctx: &TrialContext, trial: u64, rec: impl Fn(String, usize) -> Record) -> TrialResult {
    let d = ctx.params.wiener_inverse_degree;
    let a = 2.0 + trial as f64;
    let one = |c: f64| Wiener::constant(d, C64::new(c, 0.0));
    let shift = Wiener::monomial(d, 1, C64::new(1.0, 0.0));
    let f = one(a).add(&shift);
    let g = one(1.0).sub(&shift);
    let mut r = rec(instance_label::<Wiener>(&WienerDesc { degree: d }), 1);
    let input = || json!({ "f": f.to_repr(), "g": g.to_repr() });
    let inv = match wiener_inverse(&f, ctx.tol) {
        Ok(x) => x,
        Err(e) => return r.finish(false, None, Some(format!("inverse of a + e^it: {e}")), input),
    };
    let worst = (0..=10)
        .map(|q| (inv.coefficient(q) - C64::new((-1f64).powi(q as i32) / a.powi(q as i32 + 1), 0.0)).norm())
        .fold(0.0, f64::max);
    r.metric("coefficient_error", worst);
    r.metric("residual", two_sided_residual(&f, &inv));
    let refused = matches!(wiener_inverse(&g, ctx.tol), Err(AlgebraError::NotInvertible(_)));
    let failure = first_failure(&[
        (worst <= ctx.tol, format!("coefficient error {worst:e}")),
        (refused, "1 − e^it was not reported as NotInvertible".into()),
    ]);
    r.finish(failure.is_none(), Some(worst), failure, input)
}

fn ht_composition(ctx: &TrialContext, rng: &mut dyn RngCore, rec: impl Fn(String, usize) -> Record) -> TrialResult {
    let desc = HtDesc::uniform(ctx.params.ht_grid);
    let k1 = HtKernel::random(&desc, rng);
    let k2 = HtKernel::random(&desc, rng);
    let f: Vec<C64> = (0..desc.m()).map(|_| gaussian(rng)).collect();
    let mut r = rec(instance_label::<UnitizedHt>(&desc), 1);
    let zero = C64::new(0.0, 0.0);
    let input = || {
        json!({
            "k1": UnitizedHt::new(zero, k1.clone()).to_repr(),
            "k2": UnitizedHt::new(zero, k2.clone()).to_repr(),
        })
    };
    let k12 = match ht_compose(&k1, &k2) {
        Ok(k) => k,
        Err(e) => return r.finish(false, None, Some(e.to_string()), input),
    };
    let (n1, n2, n12) = (k1.norm(), k2.norm(), k12.norm());
    let excess = n12 - n1 * n2;
    let direct = k12.apply(&f);
    let nested = k1.apply(&k2.apply(&f));
    let f_sup = f.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let apply_gap = direct.iter().zip(&nested).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let apply_bound = ctx.tol * (1.0 + n1 * n2 * f_sup);
    r.metric("norm_product", n1 * n2);
    r.metric("norm_composition", n12);
    r.metric("application_gap", apply_gap);
    let failure = first_failure(&[
        (excess <= ctx.tol, format!("|||K1∘K2||| exceeds the product by {excess:e}")),
        (apply_gap <= apply_bound, format!("T_(K1∘K2) differs from T_K1·T_K2 by {apply_gap:e}")),
    ]);
    r.finish(failure.is_none(), Some(excess.max(0.0)), failure, input)
}

fn ht_unitized(ctx: &TrialContext, rng: &mut dyn RngCore, rec: impl Fn(String, usize) -> Record) -> TrialResult {
    let desc = HtDesc::uniform(ctx.params.ht_grid);
    let mut c = gaussian(rng);
    while c.norm() < 0.1 {
        c = gaussian(rng);
    }
    let raw = HtKernel::random(&desc, rng);
    let ratio = rng.random_range(0.1..0.9);
    let scaled = raw.samples() * C64::new(ratio * c.norm() / raw.norm(), 0.0);
    let kernel = HtKernel::new(desc.clone(), scaled).expect("grid-sized samples");
    let u = UnitizedHt::new(c, kernel.clone());
    let mut r = rec(instance_label::<UnitizedHt>(&desc), 1);
    let input = || json!({ "element": u.to_repr() });
    r.metric("kernel_to_scalar_ratio", ratio);
    let inv = match ht_unitized_inverse(&u, ctx.tol) {
        Ok(x) => x,
        Err(e) => return r.finish(false, None, Some(format!("engine: {e}")), input),
    };
    let residual = two_sided_residual(&u, &inv);
    let scalar_error = (inv.scalar_part() - c.inv()).norm();
    let oracle = dense_inverse_partial_pivoting(&u.to_dense().expect("grid-backed"))
        .map_err(|e| e.to_string())
        .and_then(|d| UnitizedHt::from_dense(&desc, &d).map_err(|e| e.to_string()));
    let (oracle_scalar, oracle_distance) = match &oracle {
        Ok(o) => ((o.scalar_part() - inv.scalar_part()).norm(), o.sub(&inv).norm()),
        Err(_) => (f64::INFINITY, f64::INFINITY),
    };
    let refused = matches!(
        ht_unitized_inverse(&UnitizedHt::new(C64::new(0.0, 0.0), kernel), ctx.tol),
        Err(AlgebraError::ZeroScalarPart)
    );
    r.metric("scalar_part_error", scalar_error);
    r.metric("oracle_scalar_gap", oracle_scalar);
    r.metric("oracle_distance", oracle_distance);
    let failure = first_failure(&[
        (residual <= ctx.tol, format!("residual {residual:e}")),
        (scalar_error <= SCALAR_PART_TOL, format!("scalar part off c⁻¹ by {scalar_error:e}")),
        (oracle_scalar <= SCALAR_PART_TOL, format!("scalar part off the oracle by {oracle_scalar:e}")),
        (oracle_distance <= ctx.tol * (1.0 + inv.norm()), format!("oracle distance {oracle_distance:e}")),
        (refused, "c = 0 was not refused with ZeroScalarPart".into()),
    ]);
    r.finish(failure.is_none(), Some(residual), failure, input)
}

fn scan_pair<A: Embedded + Payload>(
    t: &Matrix<A>,
    path: EnginePath,
    ctx: &TrialContext,
    seed: u64,
    mut r: Record,
) -> TrialResult
where
    A::Ambient: BanachAlgebra,
{
    let check = check_inverse_closed_pair(t, path, &strategy(seed), ctx.tol);
    if let Some(d) = check.distance {
        r.metric("ambient_distance", d);
    }
    if let Some(b) = check.bound {
        r.metric("distance_bound", b);
    }
    r.outcome.path = check.path;
    r.outcome.metrics.insert(format!("engine_{path}"), 1.0);
    if let Some(c) = check.certificate {
        r.certificate(|| c);
    }
    r.finish(check.pass, check.residual, check.detail, || matrix_value(t))
}

fn inverse_closed_scan(
    ctx: &TrialContext,
    trial: u64,
    seed: u64,
    rng: &mut dyn RngCore,
    rec: impl Fn(String, usize) -> Record,
) -> TrialResult {
    let n = pick(&ctx.sizes, trial / 4);
    let two_by_two = |other: EnginePath| if n == 2 { EnginePath::Prop4 } else { other };
    match trial % 4 {
        0 => {
            let desc = ScalarDesc { k: pick(&ctx.params.scalar_dims, trial / 8) };
            let t = random_invertible::<ScalarMatrix>(n, &desc, rng);
            scan_pair(&t, EnginePath::Thm6, ctx, seed, rec(instance_label::<ScalarMatrix>(&desc), n))
        }
        1 => {
            let desc = WienerDesc { degree: ctx.params.scan_wiener_degree };
            let t = random_invertible::<Wiener>(n, &desc, rng);
            // Only zero passes the Wiener inessential proxy, so n ≥ 3 goes
            // through the normal equations on the hermitian path.
            let path = if n == 1 { EnginePath::Thm6 } else { two_by_two(EnginePath::NormalEquations) };
            scan_pair(&t, path, ctx, seed, rec(instance_label::<Wiener>(&desc), n))
        }
        2 => {
            let desc = HtDesc::uniform(ctx.params.scan_ht_grid);
            let raw = random_matrix::<UnitizedHt>(n, &desc, rng);
            // Pure kernels below the diagonal lie in the inessential ideal.
            let pure = Matrix::from_fn(n, &desc, |j, k| {
                let e = raw.get(j, k);
                if j > k && n != 2 {
                    UnitizedHt::new(C64::new(0.0, 0.0), e.kernel().clone())
                } else {
                    e.clone()
                }
            });
            let t = shift_to_invertible(&pure);
            scan_pair(&t, two_by_two(EnginePath::Thm6), ctx, seed, rec(instance_label::<UnitizedHt>(&desc), n))
        }
        _ => {
            let t = random_invertible::<SwapPair>(n, &SwapDesc, rng);
            scan_pair(&t, two_by_two(EnginePath::Thm6), ctx, seed, rec(instance_label::<SwapPair>(&SwapDesc), n))
        }
    }
}

fn bound_trial<A: Payload>(t: &Matrix<A>, declared: Option<f64>, ctx: &TrialContext, mut r: Record) -> TrialResult {
    let input = || matrix_value(t);
    let Some(bound) = declared else {
        return r.finish(false, None, Some("instance declares no involution bound".into()), input);
    };
    match involution_ratio(t) {
        Ok(ratio) => {
            let ratio = ratio.unwrap_or(0.0);
            r.metric("ratio", ratio);
            r.metric("declared_bound", bound);
            let ok = ratio <= bound + ctx.tol;
            let detail = (!ok).then(|| format!("‖T*‖/‖T‖ = {ratio} exceeds declared {bound}"));
            r.finish(ok, Some((ratio - bound).max(0.0)), detail, input)
        }
        Err(e) => r.finish(false, None, Some(e.to_string()), input),
    }
}

/// Kernels with `|K(x,y)| = |K(y,x)|` on a uniform grid have adjoints of
/// equal norm, so their bound is exactly 1.
fn symmetric_modulus_kernel(desc: &HtDesc, rng: &mut dyn RngCore) -> HtKernel {
    let g = HtKernel::random(desc, rng);
    let s: DenseMatrix = g.samples() + g.samples().transpose();
    HtKernel::new(desc.clone(), s).expect("grid-sized samples")
}

fn involution_bound(
    ctx: &TrialContext,
    trial: u64,
    rng: &mut dyn RngCore,
    rec: impl Fn(String, usize) -> Record,
) -> TrialResult {
    let n = pick(&ctx.sizes, trial / 5);
    match trial % 5 {
        0 => {
            let desc = ScalarDesc { k: pick(&ctx.params.scalar_dims, trial / 10) };
            let t = random_matrix::<ScalarMatrix>(n, &desc, rng);
            let declared = Matrix::<ScalarMatrix>::involution_bound(&crate::MatrixDesc { n, inner: desc });
            bound_trial(&t, declared, ctx, rec(instance_label::<ScalarMatrix>(&desc), n))
        }
        1 => {
            let desc = WienerDesc { degree: ctx.params.wiener_degree };
            let t = random_matrix::<Wiener>(n, &desc, rng);
            bound_trial(&t, Wiener::involution_bound(&desc), ctx, rec(instance_label::<Wiener>(&desc), n))
        }
        2 => {
            let desc = HtDesc::uniform(ctx.params.scan_ht_grid);
            let t = random_matrix::<UnitizedHt>(n, &desc, rng);
            bound_trial(&t, UnitizedHt::involution_bound(&desc), ctx, rec(instance_label::<UnitizedHt>(&desc), n))
        }
        3 => {
            let desc = HtDesc::uniform(ctx.params.scan_ht_grid);
            let t =
                Matrix::from_fn(n, &desc, |_, _| UnitizedHt::new(gaussian(rng), symmetric_modulus_kernel(&desc, rng)));
            let label = format!("{} [symmetric modulus]", instance_label::<UnitizedHt>(&desc));
            bound_trial(&t, Some(1.0), ctx, rec(label, n))
        }
        _ => {
            let t = random_matrix::<SwapPair>(n, &SwapDesc, rng);
            bound_trial(&t, SwapPair::involution_bound(&SwapDesc), ctx, rec(instance_label::<SwapPair>(&SwapDesc), n))
        }
    }
}
