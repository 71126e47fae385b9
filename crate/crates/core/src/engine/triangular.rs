use super::{
    certify, default_inverter, EntryInverter, InversionCertificate, Method, PathTag, PivotStrategy, Reduction,
};
use crate::algebra::BanachAlgebra;
use crate::error::EngineError;
use crate::matrix::Matrix;

/// Relative size below which a sub-diagonal entry counts as zero.
const TRIANGULAR_SLACK: f64 = 1e-12;

/// Back substitution for an upper-triangular `T` with invertible diagonal.
///
/// `s_jj = t_jj⁻¹` and `s_jk = −s_jj · Σ_{j<l≤k} t_jl·s_lk` for `j < k`; the
/// result is upper triangular. Left and right factors are never commuted.
pub fn invert_upper_triangular<A: BanachAlgebra>(
    t: &Matrix<A>,
    inv: &EntryInverter<'_, A>,
) -> Result<Matrix<A>, EngineError> {
    let n = t.n();
    let desc = t.inner_desc();
    let slack = TRIANGULAR_SLACK * (1.0 + t.mat_norm());
    for j in 0..n {
        for k in 0..j {
            if t.get(j, k).norm() > slack {
                return Err(EngineError::NotTriangular { row: j + 1, col: k + 1 });
            }
        }
    }
    let mut s = Matrix::zeros(n, desc);
    for j in 0..n {
        let d = inv(t.get(j, j)).map_err(|_| EngineError::DiagonalNotInvertible(j + 1))?;
        s.set(j, j, d);
    }
    for k in 1..n {
        for j in (0..k).rev() {
            let mut acc = t.get(j, j + 1).mul(s.get(j + 1, k));
            for l in j + 2..=k {
                acc = acc.add(&t.get(j, l).mul(s.get(l, k)));
            }
            let v = s.get(j, j).mul(&acc).neg();
            s.set(j, k, v);
        }
    }
    Ok(s)
}

pub fn triangular_certificate<A: BanachAlgebra>(
    t: &Matrix<A>,
    strategy: &PivotStrategy,
    tol: f64,
) -> Result<InversionCertificate<A>, EngineError> {
    let inv = default_inverter::<A>(strategy.entry_tol);
    let inverse = invert_upper_triangular(t, &inv)?;
    let red = Reduction {
        source: t.clone(),
        factors: Vec::new(),
        reduced: t.clone(),
        inverse: inverse.clone(),
        path: PathTag::Direct,
        limit_terms: 0,
        lambdas: Vec::new(),
    };
    certify(Method::Triangular, t, red, inverse, tol, None, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{ScalarDesc, ScalarMatrix};
    use crate::C64;

    fn sm(re: &[f64]) -> ScalarMatrix {
        ScalarMatrix::from_real(2, re)
    }

    #[test]
    fn two_by_two_off_diagonal_formula() {
        let t = Matrix::from_rows(vec![
            vec![sm(&[2.0, 1.0, 0.0, 1.0]), sm(&[1.0, -1.0, 3.0, 0.5])],
            vec![ScalarMatrix::zero(&ScalarDesc { k: 2 }), sm(&[1.0, 0.0, 2.0, 4.0])],
        ])
        .unwrap();
        let inv = default_inverter::<ScalarMatrix>(1e-10);
        let s = invert_upper_triangular(&t, &inv).unwrap();
        let expect = s.get(0, 0).mul(t.get(0, 1)).mul(s.get(1, 1)).neg();
        assert!(s.get(0, 1).sub(&expect).norm() <= 1e-10);
        assert!(s.get(1, 0).norm() == 0.0);
        let (l, r) = crate::matrix::inverse_residuals(&t, &s);
        assert!(l.max(r) <= 1e-10);
    }

    #[test]
    fn singular_diagonal_is_reported_by_position() {
        let d = ScalarDesc { k: 1 };
        let one = ScalarMatrix::one(&d);
        let t = Matrix::from_rows(vec![
            vec![one.clone(), one.clone(), one.clone()],
            vec![ScalarMatrix::zero(&d), ScalarMatrix::zero(&d), one.clone()],
            vec![ScalarMatrix::zero(&d), ScalarMatrix::zero(&d), one],
        ])
        .unwrap();
        let inv = default_inverter::<ScalarMatrix>(1e-10);
        assert!(matches!(invert_upper_triangular(&t, &inv), Err(EngineError::DiagonalNotInvertible(2))));
    }

    #[test]
    fn sub_diagonal_entry_is_rejected() {
        let d = ScalarDesc { k: 1 };
        let t = Matrix::from_fn(2, &d, |_, _| ScalarMatrix::scalar(C64::new(1.0, 0.0)));
        let inv = default_inverter::<ScalarMatrix>(1e-10);
        assert!(matches!(invert_upper_triangular(&t, &inv), Err(EngineError::NotTriangular { row: 2, col: 1 })));
    }
}
