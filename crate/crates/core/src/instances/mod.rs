//! Concrete algebra pairs `A ⊂ B`.
//!
//! | instance | `A` | ambient `B` | involution |
//! |---|---|---|---|
//! | [`ScalarMatrix`] | `M_k(C)`, spectral norm | itself | conjugate transpose |
//! | [`Wiener`] | cyclic ℓ¹ Fourier coefficients | [`CircleFunction`] grid values | `f ↦ f̄` |
//! | [`UnitizedHt`] | `c·I + T_K`, Hille–Tamarkin norm | [`GridOperator`] on `ℓ^∞` | weighted adjoint |
//! | [`SwapPair`] | `C²` componentwise | itself | `(x, y) ↦ (ȳ, x̄)` (not symmetric) |

mod hille_tamarkin;
mod scalar;
mod swap;
mod wiener;

pub use hille_tamarkin::{
    ht_compose, ht_unitized_inverse, GridOperator, GridOperatorDesc, HtDesc, HtKernel, UnitizedHt,
};
pub use scalar::{ScalarDesc, ScalarMatrix};
pub use swap::{SwapDesc, SwapPair};
pub use wiener::{wiener_inverse, wiener_mul, CircleDesc, CircleFunction, Wiener, WienerDesc};

use crate::algebra::BanachAlgebra;
use crate::error::AlgebraError;
use crate::DenseMatrix;

/// Inessential-ideal proxy of an element (true for zero in every instance).
pub fn inessential_proxy<A: BanachAlgebra>(a: &A) -> bool {
    a.is_inessential()
}

/// Dense inverse through LU, accepted only if the condition number and both
/// residuals, measured with `norm`, are compatible with `tol`.
pub(crate) fn checked_dense_inverse(
    m: &DenseMatrix,
    tol: f64,
    norm: impl Fn(&DenseMatrix) -> f64,
) -> Result<DenseMatrix, AlgebraError> {
    let inv = m.clone().try_inverse().ok_or(AlgebraError::SingularToWorkingPrecision)?;
    if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(AlgebraError::SingularToWorkingPrecision);
    }
    // A residual check alone can pass by cancellation on a numerically
    // singular input; refuse when the a-priori error bound `κ·n·ε` exceeds `tol`.
    let kappa = norm(m) * norm(&inv);
    if !(kappa * m.nrows() as f64 * f64::EPSILON <= tol) {
        return Err(AlgebraError::SingularToWorkingPrecision);
    }
    let id = DenseMatrix::identity(m.nrows(), m.ncols());
    let residual = norm(&(m * &inv - &id)).max(norm(&(&inv * m - &id)));
    if residual > tol {
        return Err(AlgebraError::NotInvertible(format!("dense inverse residual {residual:e} exceeds {tol:e}")));
    }
    Ok(inv)
}

/// Largest absolute row sum: the operator norm on `ℓ^∞`.
pub(crate) fn max_row_sum(m: &DenseMatrix) -> f64 {
    m.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}
