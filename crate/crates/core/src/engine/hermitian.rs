use super::interchange::interchange_core;
use super::{
    certify, default_inverter, max_residual, polish_inverse, InversionCertificate, Method, PathTag, PivotStrategy,
    Reduction,
};
use crate::algebra::BanachAlgebra;
use crate::error::EngineError;
use crate::matrix::{nest, pad_matrix, Matrix};
use crate::C64;

/// Relative size of `T − T*` tolerated as hermitian.
const HERMITIAN_SLACK: f64 = 1e-10;

fn hermitian_defect<A: BanachAlgebra>(t: &Matrix<A>) -> Result<f64, EngineError> {
    let star = t.star_matrix().ok_or(EngineError::NoInvolution)?;
    Ok(t.try_sub(&star)?.mat_norm() / (1.0 + t.mat_norm()))
}

/// Inverts a hermitian `T` over a symmetric *-algebra.
///
/// A hermitian corner has real spectrum, so `t11 + iε` is invertible for all
/// `ε ≠ 0` and the 2×2 procedure runs along that approximation. Larger `T`
/// is padded with a unit diagonal to size `N = 2^k`, viewed as a 2×2 matrix
/// over `M_{N/2}(A)`, and the nested blocks are inverted recursively: a
/// hermitian block by this procedure, any other block `x` as
/// `(x*x)⁻¹x*`. The inverse of `T` is the top-left block of the unnested
/// result.
pub fn invert_hermitian_symmetric<A: BanachAlgebra>(
    t: &Matrix<A>,
    strategy: &PivotStrategy,
    tol: f64,
) -> Result<InversionCertificate<A>, EngineError> {
    let defect = hermitian_defect(t)?;
    if !A::is_symmetric(t.inner_desc()) {
        return Err(EngineError::NotSymmetric);
    }
    if defect > HERMITIAN_SLACK {
        return Err(EngineError::NotHermitian(defect));
    }
    let n = t.n();
    let size = n.next_power_of_two();
    let padded = pad_matrix(t, size)?;
    let mut red = hermitian_core(&padded, tol, strategy)?;
    red.inverse = polish_inverse(&padded, red.inverse);
    let inverse = red.inverse.truncate(n);
    let levels = size.trailing_zeros().saturating_sub(1) as usize;
    certify(Method::Hermitian, t, red, inverse, tol, (size != n).then_some(size), levels)
}

/// `T` hermitian of power-of-two size.
fn hermitian_core<A: BanachAlgebra>(
    t: &Matrix<A>,
    tol: f64,
    strategy: &PivotStrategy,
) -> Result<Reduction<A>, EngineError> {
    let approx = |a: &Matrix<A>, eps: f64| Ok(a.add_scalar(C64::new(0.0, eps)));
    match t.n() {
        1 => {
            let x = t.get(0, 0).inverse(strategy.entry_tol)?;
            Ok(Reduction {
                source: t.clone(),
                factors: Vec::new(),
                reduced: t.clone(),
                inverse: Matrix::from_fn(1, t.inner_desc(), |_, _| x.clone()),
                path: PathTag::Direct,
                limit_terms: 0,
                lambdas: Vec::new(),
            })
        }
        2 => {
            let inv = default_inverter::<A>(strategy.entry_tol);
            let approx = |a: &A, eps: f64| Ok(a.add_scalar(C64::new(0.0, eps)));
            interchange_core(t, tol, strategy, &inv, &approx, false)
        }
        _ => {
            let nested = nest(t)?;
            let inv = |x: &Matrix<A>| block_inverse(x, tol, strategy);
            Ok(interchange_core(&nested, tol, strategy, &inv, &approx, false)?.unnest())
        }
    }
}

/// Inverse of a block of the nested matrix, verified against `entry_tol`.
fn block_inverse<A: BanachAlgebra>(
    x: &Matrix<A>,
    tol: f64,
    strategy: &PivotStrategy,
) -> Result<Matrix<A>, EngineError> {
    let candidate = if hermitian_defect(x)? <= HERMITIAN_SLACK {
        hermitian_core(x, tol, strategy)?.inverse
    } else {
        let star = x.star_matrix().ok_or(EngineError::NoInvolution)?;
        let gram = star.try_mul(x)?;
        hermitian_core(&gram, tol, strategy)?.inverse.try_mul(&star)?
    };
    // The nested eliminations and the gram square lose accuracy with the
    // block's condition; refinement against `x` restores it.
    let candidate = polish_inverse(x, candidate);
    let residual = max_residual(x, &candidate);
    if residual <= strategy.entry_tol {
        Ok(candidate)
    } else {
        Err(EngineError::ToleranceNotMet { residual, tol: strategy.entry_tol })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::oracle_invert;
    use crate::instances::{ScalarMatrix, SwapPair};

    #[test]
    fn block_anti_diagonal() {
        let a = ScalarMatrix::from_real(2, &[2.0, 1.0, -1.0, 3.0]);
        let a_star = a.star().unwrap();
        let z = ScalarMatrix::zero(&a.descriptor());
        let t = Matrix::from_rows(vec![vec![z.clone(), a.clone()], vec![a_star.clone(), z]]).unwrap();
        let cert = invert_hermitian_symmetric(&t, &PivotStrategy::default(), 1e-8).unwrap();
        let expect_12 = a_star.inverse(1e-12).unwrap();
        let expect_21 = a.inverse(1e-12).unwrap();
        assert!(cert.inverse.get(0, 1).sub(&expect_12).norm() <= 1e-8);
        assert!(cert.inverse.get(1, 0).sub(&expect_21).norm() <= 1e-8);
        assert!(cert.inverse.get(0, 0).norm() <= 1e-8);
    }

    #[test]
    fn three_by_three_is_padded_and_nested() {
        let m = |re: &[f64]| ScalarMatrix::from_real(2, re);
        let b = m(&[0.5, -1.0, 0.25, 2.0]);
        let c = m(&[1.0, 0.0, 0.5, -0.5]);
        let d = m(&[0.0, 0.3, 0.3, 0.0]);
        let t = Matrix::from_rows(vec![
            vec![m(&[3.0, 1.0, 1.0, 2.0]), b.clone(), c.clone()],
            vec![b.star().unwrap(), m(&[-1.0, 0.0, 0.0, 4.0]), d.clone()],
            vec![c.star().unwrap(), d.star().unwrap(), m(&[2.0, 0.5, 0.5, 1.0])],
        ])
        .unwrap();
        let cert = invert_hermitian_symmetric(&t, &PivotStrategy::default(), 1e-8).unwrap();
        assert_eq!(cert.padded_to, Some(4));
        assert_eq!(cert.nest_levels, 1);
        let oracle = oracle_invert(&t).unwrap();
        assert!(cert.inverse.try_sub(&oracle).unwrap().mat_norm() <= 1e-8);
        assert!(cert.replay_error().unwrap() <= 1e-10);
    }

    #[test]
    fn refuses_non_symmetric_algebra_and_non_hermitian_input() {
        let one = SwapPair::one(&crate::instances::SwapDesc);
        let t = Matrix::from_fn(2, &crate::instances::SwapDesc, |j, k| {
            if j == k {
                one
            } else {
                SwapPair::zero(&crate::instances::SwapDesc)
            }
        });
        assert!(matches!(
            invert_hermitian_symmetric(&t, &PivotStrategy::default(), 1e-8),
            Err(EngineError::NotSymmetric)
        ));
        let a = ScalarMatrix::from_real(1, &[1.0]);
        let b = ScalarMatrix::from_real(1, &[2.0]);
        let t = Matrix::from_rows(vec![vec![a.clone(), b], vec![a.clone(), a]]).unwrap();
        assert!(matches!(
            invert_hermitian_symmetric(&t, &PivotStrategy::default(), 1e-8),
            Err(EngineError::NotHermitian(_))
        ));
    }
}
