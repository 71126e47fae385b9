use super::{certify, InversionCertificate, Method, PathTag, Reduction};
use crate::algebra::BanachAlgebra;
use crate::error::{AlgebraError, EngineError};
use crate::matrix::{flatten, unflatten, Matrix};
use crate::{DenseMatrix, C64};

/// Gauss–Jordan inversion with partial pivoting.
///
/// Kept independent of the library LU used by the instances so that the
/// oracle and the engine do not share a code path.
pub fn dense_inverse_partial_pivoting(m: &DenseMatrix) -> Result<DenseMatrix, EngineError> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(EngineError::SingularToWorkingPrecision);
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(EngineError::SingularToWorkingPrecision);
    }
    let floor = n as f64 * f64::EPSILON * scale;
    let mut a = m.clone();
    let mut inv = DenseMatrix::identity(n, n);
    for col in 0..n {
        let (piv, mag) = (col..n)
            .map(|r| (r, a[(r, col)].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty pivot column");
        if mag <= floor {
            return Err(EngineError::SingularToWorkingPrecision);
        }
        a.swap_rows(col, piv);
        inv.swap_rows(col, piv);
        let d = C64::new(1.0, 0.0) / a[(col, col)];
        for k in 0..n {
            a[(col, k)] *= d;
            inv[(col, k)] *= d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[(r, col)];
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..n {
                let (ack, ick) = (a[(col, k)], inv[(col, k)]);
                a[(r, k)] -= f * ack;
                inv[(r, k)] -= f * ick;
            }
        }
    }
    Ok(inv)
}

/// Flattens `T` to one scalar matrix, inverts it densely and reshapes back.
pub fn oracle_invert<A: BanachAlgebra>(t: &Matrix<A>) -> Result<Matrix<A>, EngineError> {
    let dense = flatten(t).ok_or(AlgebraError::NotSupported("dense representation"))?;
    let inv = dense_inverse_partial_pivoting(&dense)?;
    Ok(unflatten(t.n(), t.inner_desc(), &inv)?)
}

pub fn oracle_certificate<A: BanachAlgebra>(t: &Matrix<A>, tol: f64) -> Result<InversionCertificate<A>, EngineError> {
    let inverse = oracle_invert(t)?;
    let red = Reduction {
        source: t.clone(),
        factors: Vec::new(),
        reduced: t.clone(),
        inverse: inverse.clone(),
        path: PathTag::Direct,
        limit_terms: 0,
        lambdas: Vec::new(),
    };
    certify(Method::Oracle, t, red, inverse, tol, None, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::ScalarMatrix;

    #[test]
    fn upper_triangular_closed_form() {
        let c = |x: f64| ScalarMatrix::scalar(C64::new(x, 0.0));
        let t = Matrix::from_rows(vec![vec![c(2.0), c(1.0)], vec![c(0.0), c(4.0)]]).unwrap();
        let inv = oracle_invert(&t).unwrap();
        let expect = [[0.5, -0.125], [0.0, 0.25]];
        for (j, row) in expect.iter().enumerate() {
            for (k, &x) in row.iter().enumerate() {
                assert!((inv.get(j, k).entry(0, 0) - C64::new(x, 0.0)).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn singular_is_refused() {
        let m = DenseMatrix::from_fn(3, 3, |i, j| C64::new((i + j) as f64, 0.0));
        assert!(matches!(dense_inverse_partial_pivoting(&m), Err(EngineError::SingularToWorkingPrecision)));
    }
}
