use super::{
    certify, compose_inverse, default_inverter, limit_of_inverses, EntryInverter, InversionCertificate, Method,
    PathTag, PivotStrategy, Reduction,
};
use crate::algebra::BanachAlgebra;
use crate::error::EngineError;
use crate::matrix::{build_elimination_pair, GlPair, Matrix};

/// Positions whose entries must pass the inessential proxy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InessentialMask {
    n: usize,
    flags: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Orientation {
    Upper,
    Lower,
}

impl InessentialMask {
    pub fn below_diagonal(n: usize) -> Self {
        Self::from_predicate(n, |j, k| j > k)
    }

    pub fn above_diagonal(n: usize) -> Self {
        Self::from_predicate(n, |j, k| j < k)
    }

    /// Zero-based positions.
    pub fn from_positions(n: usize, positions: &[(usize, usize)]) -> Self {
        let mut m = Self::from_predicate(n, |_, _| false);
        for &(j, k) in positions {
            m.flags[j * n + k] = true;
        }
        m
    }

    fn from_predicate(n: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        InessentialMask { n, flags: (0..n * n).map(|i| f(i / n, i % n)).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, k: usize) -> bool {
        self.flags[j * self.n + k]
    }

    /// Checks the flagged entries and returns which triangle is covered.
    ///
    /// Unflagged entries below (or above) the diagonal must vanish for that
    /// triangle to count as covered.
    fn validate<A: BanachAlgebra>(&self, t: &Matrix<A>) -> Result<Orientation, EngineError> {
        let n = t.n();
        if self.n != n {
            return Err(crate::error::MatrixError::DimensionMismatch(self.n, n).into());
        }
        for j in 0..n {
            for k in 0..n {
                if self.get(j, k) && !t.get(j, k).is_inessential() {
                    return Err(EngineError::MaskViolation { row: j + 1, col: k + 1 });
                }
            }
        }
        let covered = |j: usize, k: usize| self.get(j, k) || t.get(j, k).norm() == 0.0;
        let first_gap = |lower: bool| {
            (0..n)
                .flat_map(|j| (0..n).map(move |k| (j, k)))
                .filter(|&(j, k)| if lower { j > k } else { j < k })
                .find(|&(j, k)| !covered(j, k))
        };
        match (first_gap(true), first_gap(false)) {
            (None, _) => Ok(Orientation::Upper),
            (_, None) => Ok(Orientation::Lower),
            (Some((j, k)), Some(_)) => Err(EngineError::MaskViolation { row: j + 1, col: k + 1 }),
        }
    }
}

/// Recursive elimination for `T` whose entries on one side of the diagonal
/// are inessential.
///
/// With an invertible corner, `T` is normalised to a unit corner, the first
/// row and column are eliminated and the trailing minor `d − c·b` is treated
/// the same way. The minor again has inessential sub-diagonal entries because
/// the inessential elements form an ideal. With a singular corner the first
/// two rows are interchanged; the new corner is inessential, so it is a limit
/// of invertible `λ_m + t21` with `λ_m → 0`, and the inverse is the limit of
/// the perturbed inverses. Lower-triangular patterns are handled by reversing rows and
/// columns.
pub fn thm6_invert<A: BanachAlgebra>(
    t: &Matrix<A>,
    mask: &InessentialMask,
    strategy: &PivotStrategy,
    tol: f64,
) -> Result<InversionCertificate<A>, EngineError> {
    let orientation = mask.validate(t)?;
    let inv = default_inverter::<A>(strategy.entry_tol);
    let red = match orientation {
        Orientation::Upper => elimination_core(t, tol, strategy, &inv)?,
        Orientation::Lower => elimination_core(&t.reversed(), tol, strategy, &inv)?.reversed(),
    };
    let inverse = red.inverse.clone();
    certify(Method::Thm6, t, red, inverse, tol, None, 0)
}

pub(crate) fn elimination_core<A: BanachAlgebra>(
    t: &Matrix<A>,
    tol: f64,
    strategy: &PivotStrategy,
    inv: &EntryInverter<'_, A>,
) -> Result<Reduction<A>, EngineError> {
    let n = t.n();
    if n == 1 {
        let x =
            inv(t.get(0, 0)).map_err(|_| EngineError::NotInvertibleInAmbient("1×1 entry is not invertible".into()))?;
        return Ok(Reduction {
            source: t.clone(),
            factors: Vec::new(),
            reduced: t.clone(),
            inverse: Matrix::from_fn(1, t.inner_desc(), |_, _| x.clone()),
            path: PathTag::Direct,
            limit_terms: 0,
            lambdas: Vec::new(),
        });
    }
    if let Ok(p) = inv(t.get(0, 0)) {
        return eliminate_first(t, &p, tol, strategy, inv);
    }
    let swap = GlPair::row_swap(n, t.inner_desc(), 0, 1);
    let r = swap.apply(t)?;
    let pivot = r.get(0, 0).clone();
    let (red, path) = match inv(&pivot) {
        Ok(p) => (eliminate_first(&r, &p, tol, strategy, inv)?, PathTag::Interchange),
        Err(_) => {
            let (mut red, terms) = limit_of_inverses(&r, tol, strategy.limit_budget, strategy.limit_ratio, |m| {
                let lambda = strategy.limit_lambda(&pivot, m);
                let mut rm = r.clone();
                rm.set(0, 0, pivot.add_scalar(lambda));
                let p = inv(rm.get(0, 0))?;
                let mut red = eliminate_first(&rm, &p, tol, strategy, inv)?;
                red.lambdas.insert(0, lambda);
                Ok(red)
            })?;
            red.limit_terms += terms;
            (red, PathTag::PerturbedLimit)
        }
    };
    let inverse = red.inverse.try_mul(&swap.v)?;
    let source = swap.v_inv.try_mul(&red.source)?;
    let mut factors = vec![swap];
    factors.extend(red.factors);
    Ok(Reduction { source, factors, inverse, path: red.path.join(path), ..red })
}

/// One elimination step for `t` with corner inverse `p`, then recursion on
/// the trailing minor.
fn eliminate_first<A: BanachAlgebra>(
    t: &Matrix<A>,
    p: &A,
    tol: f64,
    strategy: &PivotStrategy,
    inv: &EntryInverter<'_, A>,
) -> Result<Reduction<A>, EngineError> {
    let n = t.n();
    let desc = t.inner_desc();
    let corner = t.get(0, 0).clone();
    let diag = |x: &A| {
        Matrix::from_fn(n, desc, |j, k| match (j, k) {
            (0, 0) => x.clone(),
            _ if j == k => A::one(desc),
            _ => A::zero(desc),
        })
    };
    let normalize = GlPair::left("normalize", diag(p), diag(&corner));
    let t1 = normalize.apply(t)?;
    let elim = build_elimination_pair(&t1, strategy.entry_tol)?;
    let s = elim.apply(&t1)?;
    let minor = s.trailing_minor();
    let sub = elimination_core(&minor, tol, strategy, inv)?;

    let mut factors = vec![normalize, elim];
    let minor_perturbed = sub.path == PathTag::PerturbedLimit;
    let source = if minor_perturbed {
        let inner = factors[1].v_inv.try_mul(&sub.source.bordered())?.try_mul(&factors[1].w_inv)?;
        factors[0].v_inv.try_mul(&inner)?
    } else {
        t.clone()
    };
    let s_inv = sub.inverse.bordered();
    let inverse = compose_inverse(&factors, &s_inv)?;
    factors.extend(sub.factors.iter().map(GlPair::bordered));
    Ok(Reduction {
        source,
        factors,
        reduced: sub.reduced.bordered(),
        inverse,
        path: sub.path,
        limit_terms: sub.limit_terms,
        lambdas: sub.lambdas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{ht_unitized_inverse, HtDesc, HtKernel, ScalarMatrix, UnitizedHt};
    use crate::C64;

    fn c(re: f64) -> ScalarMatrix {
        ScalarMatrix::scalar(C64::new(re, 0.0))
    }

    #[test]
    fn scalar_three_by_three_direct() {
        let rows = [[4.0, 1.0, 2.0], [1.0, 3.0, 0.5], [2.0, -1.0, 5.0]];
        let t = Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| c(x)).collect()).collect()).unwrap();
        let cert = thm6_invert(&t, &InessentialMask::below_diagonal(3), &PivotStrategy::default(), 1e-10).unwrap();
        assert_eq!(cert.path, PathTag::Direct);
        assert!(cert.replay_error().unwrap() <= 1e-10);
    }

    #[test]
    fn singular_corner_takes_perturbed_limit() {
        let rows = [[0.0, 1.0, 2.0], [1.0, 3.0, 0.5], [2.0, -1.0, 5.0]];
        let t = Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| c(x)).collect()).collect()).unwrap();
        let cert = thm6_invert(&t, &InessentialMask::below_diagonal(3), &PivotStrategy::default(), 1e-8).unwrap();
        assert!(cert.residual() <= 1e-8);
        assert!(cert.replay_error().unwrap() <= 1e-10);
    }

    #[test]
    fn lower_pattern_is_reversed() {
        let d = HtDesc::uniform(8);
        let k = |s: f64| {
            UnitizedHt::new(C64::new(0.0, 0.0), HtKernel::from_fn(&d, |x, y| C64::new(s * (x - y).cos(), 0.0)))
        };
        let u = |c0: f64| UnitizedHt::new(C64::new(c0, 0.0), HtKernel::zero(&d));
        let t = Matrix::from_rows(vec![
            vec![u(2.0), k(0.0), k(0.0)],
            vec![k(0.3), u(1.5), k(0.0)],
            vec![k(0.1), k(0.2), u(3.0)],
        ])
        .unwrap();
        let mask = InessentialMask::above_diagonal(3);
        let cert = thm6_invert(&t, &mask, &PivotStrategy::default(), 1e-8).unwrap();
        assert!(cert.residual() <= 1e-8);
        assert!(ht_unitized_inverse(t.get(0, 0), 1e-10).is_ok());
    }

    #[test]
    fn mask_violation_names_the_entry() {
        let t = Matrix::from_fn(3, &HtDesc::uniform(4), |j, k| {
            UnitizedHt::new(C64::new(if j >= k { 1.0 } else { 0.0 }, 0.0), HtKernel::zero(&HtDesc::uniform(4)))
        });
        let err = thm6_invert(&t, &InessentialMask::below_diagonal(3), &PivotStrategy::default(), 1e-8).unwrap_err();
        assert!(matches!(err, EngineError::MaskViolation { row: 2, col: 1 }), "{err:?}");
    }
}
