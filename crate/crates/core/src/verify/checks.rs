//! Checks of the structural properties of a subalgebra pair `A ⊂ B` lifted to
//! matrices.

use std::fmt;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::algebra::{gelfand_radius, BanachAlgebra, Embedded, SpectralReport};
use crate::engine::{invert_hermitian_symmetric, invert_with, oracle_invert, Method, PathTag, PivotStrategy};
use crate::error::{AlgebraError, EngineError};
use crate::instances::Wiener;
use crate::matrix::{flatten, inverse_residuals, Matrix};
use crate::rng::{rng_from_seed, trial_seed};
use crate::serial::{certificate_to_json, InstanceDescriptor, MatrixFile, Payload};
use crate::C64;

use super::random::random_matrix;

/// Human-readable `A ⊂ B` label of an instance.
pub fn instance_label<A: Payload>(desc: &A::Desc) -> String {
    match A::instance(desc) {
        InstanceDescriptor::ScalarMatrix { k } => format!("M_{k}(C) in M_{k}(C)"),
        InstanceDescriptor::Wiener { degree } => format!("wiener(d={degree}) in C(T_{})", 2 * degree + 1),
        InstanceDescriptor::HilleTamarkin { points, .. } => {
            format!("unitized_ht(m={}) in B(l_inf^{})", points.len(), points.len())
        }
        InstanceDescriptor::SwapInvolution => "swap_involution in C^2".into(),
    }
}

pub(crate) fn matrix_value<A: Payload>(t: &Matrix<A>) -> serde_json::Value {
    serde_json::to_value(MatrixFile::from(t)).expect("finite payloads serialize")
}

/// Spectral radius of `T` estimated from powers in `M_n(A)` and in `M_n(B)`.
pub fn check_srp_matrix_lift<A: Embedded>(t: &Matrix<A>, n_max: usize) -> Result<SpectralReport, AlgebraError> {
    let a_side = gelfand_radius(t, n_max)?;
    let b_side = gelfand_radius(&t.embed(), n_max)?;
    let discrepancy = (a_side.radius_a - b_side.radius_a).abs();
    Ok(SpectralReport {
        label: format!("{}x{} matrix", t.n(), t.n()),
        radius_b: Some(b_side.radius_a),
        converged: a_side.converged && b_side.converged,
        discrepancy: Some(discrepancy),
        ..a_side
    })
}

/// Spectral radius of a 2×2 Wiener matrix from the closed-form eigenvalues
/// of its symbol at every grid point.
pub fn wiener_symbol_radius(t: &Matrix<Wiener>) -> f64 {
    assert_eq!(t.n(), 2, "symbol radius is implemented for 2x2 matrices");
    let v: Vec<Vec<C64>> = t.entries().iter().map(Wiener::grid_values).collect();
    (0..v[0].len())
        .map(|g| {
            let (a, b, c, d) = (v[0][g], v[1][g], v[2][g], v[3][g]);
            let half_tr = (a + d) * 0.5;
            let root = (half_tr * half_tr - (a * d - b * c)).sqrt();
            (half_tr + root).norm().max((half_tr - root).norm())
        })
        .fold(0.0, f64::max)
}

/// Engine route used to recover an inverse inside `M_n(A)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnginePath {
    Prop4,
    Thm6,
    Hermitian,
    /// `T⁻¹ = (T*T)⁻¹T*`, the Gram matrix inverted on the hermitian path.
    NormalEquations,
}

impl fmt::Display for EnginePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnginePath::Prop4 => "prop4",
            EnginePath::Thm6 => "thm6",
            EnginePath::Hermitian => "hermitian",
            EnginePath::NormalEquations => "normal_equations",
        })
    }
}

/// Result of one inverse-closedness trial.
#[derive(Debug, Clone)]
pub struct ClosureCheck {
    pub pass: bool,
    /// Two-sided residual of the A-side inverse; `None` if the engine failed.
    pub residual: Option<f64>,
    /// `‖ι(T_A⁻¹) − T_B⁻¹‖` in `M_n(B)`.
    pub distance: Option<f64>,
    pub bound: Option<f64>,
    pub path: Option<PathTag>,
    pub detail: Option<String>,
    pub certificate: Option<String>,
}

/// Recovered inverse, the engine's path and its certificate JSON.
type Recovery<A> = (Matrix<A>, Option<PathTag>, Option<String>);

fn recover<A: Payload>(
    t: &Matrix<A>,
    path: EnginePath,
    strategy: &PivotStrategy,
    tol: f64,
) -> Result<Recovery<A>, EngineError> {
    let method = match path {
        EnginePath::Prop4 => Method::Prop4,
        EnginePath::Thm6 => Method::Thm6,
        EnginePath::Hermitian => Method::Hermitian,
        EnginePath::NormalEquations => {
            let star = t.star_matrix().ok_or(EngineError::NoInvolution)?;
            let gram = star.try_mul(t)?;
            let cert = invert_hermitian_symmetric(&gram, strategy, tol * 1e-2)?;
            let x = cert.inverse.try_mul(&star)?;
            return Ok((x, Some(cert.path), Some(certificate_to_json(&cert))));
        }
    };
    let cert = invert_with(method, t, strategy, tol)?;
    Ok((cert.inverse.clone(), Some(cert.path), Some(certificate_to_json(&cert))))
}

/// Inverts `T` in `M_n(B)` with the dense oracle and recovers the inverse in
/// `M_n(A)` along `path`. Passes iff the A-side inverse has residual at most
/// `tol` and lies within `tol·(1 + ‖T_B⁻¹‖)` of the B-side inverse.
pub fn check_inverse_closed_pair<A: Embedded + Payload>(
    t: &Matrix<A>,
    path: EnginePath,
    strategy: &PivotStrategy,
    tol: f64,
) -> ClosureCheck
where
    A::Ambient: BanachAlgebra,
{
    let fail = |detail: String| ClosureCheck {
        pass: false,
        residual: None,
        distance: None,
        bound: None,
        path: None,
        detail: Some(detail),
        certificate: None,
    };
    let b_inv = match oracle_invert(&t.embed()) {
        Ok(x) => x,
        Err(e) => return fail(format!("not invertible in the ambient algebra: {e}")),
    };
    let (x, tag, certificate) = match recover(t, path, strategy, tol) {
        Ok(r) => r,
        Err(e) => return fail(format!("{path} failed: {e}")),
    };
    let (left, right) = inverse_residuals(t, &x);
    let residual = left.max(right);
    let distance = x.embed().try_sub(&b_inv).map(|d| d.mat_norm()).unwrap_or(f64::INFINITY);
    let bound = tol * (1.0 + b_inv.mat_norm());
    let pass = residual <= tol && distance <= bound;
    ClosureCheck {
        pass,
        residual: Some(residual),
        distance: Some(distance),
        bound: Some(bound),
        path: tag,
        detail: (!pass).then(|| format!("residual {residual:e}, distance {distance:e} (bound {bound:e})")),
        certificate,
    }
}

/// Result of testing `I + T*T` for one matrix.
#[derive(Debug, Clone)]
pub struct LiftCheck {
    pub pass: bool,
    /// Residual of the oracle inverse of `I + T*T`, if it exists.
    pub residual: Option<f64>,
    /// Smallest eigenvalue of the flattened `I + T*T` when the involution is
    /// the adjoint of the dense representation.
    pub min_eigenvalue: Option<f64>,
    pub detail: Option<String>,
}

/// Checks that `I + T*T` is invertible, by the oracle and, when the
/// involution is the representation adjoint, by its smallest eigenvalue.
pub fn symmetric_lift_single<A: BanachAlgebra>(t: &Matrix<A>, tol: f64) -> Result<LiftCheck, AlgebraError> {
    let star = t.star_matrix().ok_or(AlgebraError::NoInvolution)?;
    let s = Matrix::identity(t.n(), t.inner_desc()).try_add(&star.try_mul(t).expect("same shape")).expect("same shape");
    let min_eigenvalue =
        if A::star_is_adjoint(t.inner_desc()) { flatten(&s).map(|d| d.symmetric_eigenvalues().min()) } else { None };
    let oracle = oracle_invert(&s);
    let residual = oracle.as_ref().ok().map(|x| {
        let (l, r) = inverse_residuals(&s, x);
        l.max(r)
    });
    let eigen_ok = min_eigenvalue.is_none_or(|l| l >= 1.0 - tol);
    let oracle_ok = residual.is_some_and(|r| r <= 1e-8);
    let detail = match (&oracle, eigen_ok) {
        (Err(e), _) => Some(format!("I + T*T is not invertible: {e}")),
        (Ok(_), false) => Some(format!("smallest eigenvalue {:e} below 1", min_eigenvalue.unwrap_or(f64::NAN))),
        (Ok(_), true) if !oracle_ok => Some(format!("oracle residual {:e}", residual.unwrap_or(f64::NAN))),
        _ => None,
    };
    Ok(LiftCheck { pass: eigen_ok && oracle_ok, residual, min_eigenvalue, detail })
}

/// Draws `trials` random `T ∈ M_n(A)` and checks `I + T*T` for each. Trial
/// `i` uses the seed `trial_seed(seed, 0, i)`.
pub fn check_symmetric_lift<A: BanachAlgebra>(
    desc: &A::Desc,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<LiftCheck>, AlgebraError> {
    if A::one(desc).star().is_none() {
        return Err(AlgebraError::NoInvolution);
    }
    (0..trials as u64)
        .map(|i| {
            let mut rng = rng_from_seed(trial_seed(seed, 0, i));
            symmetric_lift_single(&random_matrix::<A>(n, desc, &mut rng), 1e-10)
        })
        .collect()
}

/// `‖a*‖ / ‖a‖`, or `None` for `a = 0`.
pub fn involution_ratio<A: BanachAlgebra>(a: &A) -> Result<Option<f64>, AlgebraError> {
    let star = a.star().ok_or(AlgebraError::NoInvolution)?;
    let n = a.norm();
    Ok((n > 0.0).then(|| star.norm() / n))
}

/// Empirical maximum of `‖a*‖/‖a‖` over `samples` random elements.
pub fn check_involution_bound<A: BanachAlgebra>(
    desc: &A::Desc,
    samples: usize,
    rng: &mut dyn RngCore,
) -> Result<f64, AlgebraError> {
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        if let Some(r) = involution_ratio(&A::random(desc, rng))? {
            worst = worst.max(r);
        }
    }
    Ok(worst)
}
