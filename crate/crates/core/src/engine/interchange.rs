use super::{
    certify, compose_inverse, default_approximant, default_inverter, limit_of_inverses, max_residual, Approximant,
    EntryInverter, InversionCertificate, Method, PathTag, PivotStrategy, Reduction,
};
use crate::algebra::BanachAlgebra;
use crate::error::{EngineError, MatrixError};
use crate::matrix::{GlPair, Matrix};
use crate::C64;

use super::triangular::invert_upper_triangular;

/// Inverts `T ∈ M_2(A)` by a pivot interchange followed by one elimination.
///
/// An invertible entry is moved to the corner by row and column swaps. With
/// `a = t11⁻¹`, left multiplication by `[[λa, 1], [1, 0]]` makes the corner
/// `λ + t21`, invertible for suitable `λ`; one more elimination leaves an
/// upper-triangular matrix. If no entry is invertible, `t11` is replaced by a
/// sequence of invertible approximants and the inverses are passed to the
/// limit.
pub fn prop4_invert_2x2<A: BanachAlgebra>(
    t: &Matrix<A>,
    strategy: &PivotStrategy,
    tol: f64,
) -> Result<InversionCertificate<A>, EngineError> {
    if t.n() != 2 {
        return Err(MatrixError::DimensionMismatch(2, t.n()).into());
    }
    let inv = default_inverter::<A>(strategy.entry_tol);
    let approx = default_approximant::<A>(strategy.entry_tol);
    let red = interchange_core(t, tol, strategy, &inv, &approx, true)?;
    let inverse = red.inverse.clone();
    certify(Method::Prop4, t, red, inverse, tol, None, 0)
}

pub(crate) fn interchange_core<A: BanachAlgebra>(
    t: &Matrix<A>,
    tol: f64,
    strategy: &PivotStrategy,
    inv: &EntryInverter<'_, A>,
    approx: &Approximant<'_, A>,
    interchange: bool,
) -> Result<Reduction<A>, EngineError> {
    if t.n() != 2 {
        return Err(MatrixError::DimensionMismatch(2, t.n()).into());
    }
    let desc = t.inner_desc();
    let corners: &[(usize, usize)] = if interchange { &[(0, 0), (1, 0), (0, 1), (1, 1)] } else { &[(0, 0)] };
    for &(r, c) in corners {
        let Ok(a) = inv(t.get(r, c)) else { continue };
        let mut swaps = Vec::new();
        let mut moved = t.clone();
        if r == 1 {
            swaps.push(GlPair::row_swap(2, desc, 0, 1));
        }
        if c == 1 {
            swaps.push(GlPair::col_swap(2, desc, 0, 1));
        }
        for s in &swaps {
            moved = s.apply(&moved)?;
        }
        let mut red = interchange_pivoted(&moved, &a, tol, strategy, inv)?;
        if swaps.is_empty() {
            return Ok(red);
        }
        let mut inverse = red.inverse;
        for s in swaps.iter().rev() {
            inverse = s.w.try_mul(&inverse)?.try_mul(&s.v)?;
        }
        let mut source = red.source;
        for s in swaps.iter().rev() {
            source = s.v_inv.try_mul(&source)?.try_mul(&s.w_inv)?;
        }
        swaps.append(&mut red.factors);
        return Ok(Reduction { source, factors: swaps, inverse, path: red.path.join(PathTag::Interchange), ..red });
    }

    let t11 = t.get(0, 0).clone();
    let (mut red, terms) = limit_of_inverses(t, tol, strategy.limit_budget, strategy.limit_ratio, |m| {
        let eps = strategy.limit_modulus(m);
        let am = approx(&t11, eps)?;
        let a = inv(&am)?;
        let mut tm = t.clone();
        tm.set(0, 0, am);
        interchange_pivoted(&tm, &a, tol, strategy, inv)
    })?;
    red.path = PathTag::PerturbedLimit;
    red.limit_terms = terms;
    Ok(red)
}

/// The 2×2 procedure for `T` whose corner has the inverse `a`.
fn interchange_pivoted<A: BanachAlgebra>(
    t: &Matrix<A>,
    a: &A,
    tol: f64,
    strategy: &PivotStrategy,
    inv: &EntryInverter<'_, A>,
) -> Result<Reduction<A>, EngineError> {
    let desc = t.inner_desc();
    let zero = A::zero(desc);
    let one = A::one(desc);
    let mut best: Option<(f64, Reduction<A>)> = None;
    let mut last_err = None;
    for lambda in strategy.lambda_candidates(t.get(1, 0)) {
        let la = a.scale(lambda);
        let v = Matrix::from_rows(vec![vec![la.clone(), one.clone()], vec![one.clone(), zero.clone()]])?;
        let v_inv = interchange_inverse(a, lambda);
        let interchange = GlPair::left("interchange", v, v_inv);
        let r = interchange.apply(t)?;
        let r11_inv = match inv(r.get(0, 0)) {
            Ok(x) => x,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let x = r.get(1, 0).mul(&r11_inv);
        let w = Matrix::from_rows(vec![vec![one.clone(), zero.clone()], vec![x.neg(), one.clone()]])?;
        let w_inv = Matrix::from_rows(vec![vec![one.clone(), zero.clone()], vec![x, one.clone()]])?;
        let eliminate = GlPair::left("eliminate", w, w_inv);
        let mut s = eliminate.apply(&r)?;
        s.set(1, 0, zero.clone());
        let s_inv = match invert_upper_triangular(&s, inv) {
            Ok(x) => x,
            Err(EngineError::DiagonalNotInvertible(2)) => {
                return Err(EngineError::NotInvertibleInAmbient(
                    "Schur complement of the interchanged matrix is not invertible".into(),
                ))
            }
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let factors = vec![interchange, eliminate];
        let inverse = compose_inverse(&factors, &s_inv)?;
        let residual = max_residual(t, &inverse);
        let red = Reduction {
            source: t.clone(),
            factors,
            reduced: s,
            inverse,
            path: PathTag::Direct,
            limit_terms: 0,
            lambdas: vec![lambda],
        };
        if residual <= tol {
            return Ok(red);
        }
        if best.as_ref().is_none_or(|(b, _)| residual < *b) {
            best = Some((residual, red));
        }
    }
    match (best, last_err) {
        (Some((_, red)), _) => Ok(red),
        (None, Some(EngineError::Algebra(_))) | (None, None) => {
            Err(EngineError::NoAdmissibleLambda(strategy.lambda_candidates(t.get(1, 0)).len()))
        }
        (None, Some(e)) => Err(e),
    }
}

/// `[[λa, 1], [1, 0]]⁻¹ = [[0, 1], [1, −λa]]`.
pub fn interchange_inverse<A: BanachAlgebra>(a: &A, lambda: C64) -> Matrix<A> {
    let desc = a.descriptor();
    Matrix::from_rows(vec![vec![A::zero(&desc), A::one(&desc)], vec![A::one(&desc), a.scale(lambda).neg()]])
        .expect("2x2 with one descriptor")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{ScalarDesc, ScalarMatrix, Wiener, WienerDesc};
    use crate::matrix::inverse_residuals;

    fn c(re: f64) -> ScalarMatrix {
        ScalarMatrix::scalar(C64::new(re, 0.0))
    }

    #[test]
    fn swap_matrix_goes_through_interchange() {
        let t = Matrix::from_rows(vec![vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]]).unwrap();
        let cert = prop4_invert_2x2(&t, &PivotStrategy::default(), 1e-12).unwrap();
        assert_eq!(cert.path, PathTag::Interchange);
        assert!(cert.inverse.try_sub(&t).unwrap().mat_norm() <= 1e-12);
    }

    #[test]
    fn interchange_factor_inverse_is_exact() {
        let a = ScalarMatrix::from_real(2, &[1.0, 2.0, -0.5, 3.0]);
        let lambda = C64::new(0.25, -0.5);
        let v = Matrix::from_rows(vec![
            vec![a.scale(lambda), ScalarMatrix::one(&ScalarDesc { k: 2 })],
            vec![ScalarMatrix::one(&ScalarDesc { k: 2 }), ScalarMatrix::zero(&ScalarDesc { k: 2 })],
        ])
        .unwrap();
        let (l, r) = inverse_residuals(&v, &interchange_inverse(&a, lambda));
        assert!(l.max(r) <= 1e-14);
    }

    #[test]
    fn singular_matrix_is_not_invertible_in_ambient() {
        let t = Matrix::from_rows(vec![vec![c(1.0), c(2.0)], vec![c(2.0), c(4.0)]]).unwrap();
        let err = prop4_invert_2x2(&t, &PivotStrategy::default(), 1e-10).unwrap_err();
        assert!(matches!(err, EngineError::NotInvertibleInAmbient(_)), "{err:?}");
    }

    #[test]
    fn wiener_entries_with_invertible_corner() {
        let d = WienerDesc { degree: 8 };
        let f = |q: &[(i64, f64)]| {
            let mut w = Wiener::zero(&d);
            for &(k, v) in q {
                w = w.add(&Wiener::monomial(d.degree, k, C64::new(v, 0.0)));
            }
            w
        };
        let t = Matrix::from_rows(vec![
            vec![f(&[(0, 3.0), (1, 1.0)]), f(&[(-1, 0.5)])],
            vec![f(&[(2, 0.25)]), f(&[(0, 2.0), (-1, 0.5)])],
        ])
        .unwrap();
        let cert = prop4_invert_2x2(&t, &PivotStrategy::default(), 1e-8).unwrap();
        assert!(cert.residual() <= 1e-8);
        assert!(cert.replay_error().unwrap() <= 1e-10);
    }
}
