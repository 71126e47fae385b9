//! Random matrices for the experiment suites.

use rand::{Rng, RngCore};

use crate::algebra::BanachAlgebra;
use crate::instances::{ScalarDesc, ScalarMatrix};
use crate::matrix::{flatten, Matrix};
use crate::rng::gaussian;
use crate::{DenseMatrix, C64};

/// Flattened matrices are shifted until their smallest singular value
/// exceeds this.
pub const MIN_SINGULAR_VALUE: f64 = 1e-3;

const SHIFTS: [f64; 10] = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0];

pub fn singular_value_range(d: &DenseMatrix) -> (f64, f64) {
    let sv = d.singular_values();
    (sv.min(), sv.max())
}

/// Invertibility to working precision: `σ_min > rel·σ_max`.
pub fn dense_is_invertible(d: &DenseMatrix, rel: f64) -> bool {
    let (lo, hi) = singular_value_range(d);
    hi > 0.0 && lo > rel * hi
}

pub fn matrix_smallest_singular_value<A: BanachAlgebra>(t: &Matrix<A>) -> Option<f64> {
    flatten(t).map(|d| singular_value_range(&d).0)
}

pub fn random_matrix<A: BanachAlgebra>(n: usize, desc: &A::Desc, rng: &mut dyn RngCore) -> Matrix<A> {
    Matrix::from_fn(n, desc, |_, _| A::random(desc, rng))
}

/// `T + c·I` for the first `c` in a fixed schedule whose flattened form has
/// smallest singular value above [`MIN_SINGULAR_VALUE`].
pub fn shift_to_invertible<A: BanachAlgebra>(t: &Matrix<A>) -> Matrix<A> {
    let id = Matrix::identity(t.n(), t.inner_desc());
    for c in SHIFTS {
        let shifted = t.try_add(&id.scale(C64::new(c, 0.0))).expect("same shape");
        match matrix_smallest_singular_value(&shifted) {
            Some(s) if s > MIN_SINGULAR_VALUE => return shifted,
            None => return shifted,
            _ => {}
        }
    }
    t.try_add(&id.scale(C64::new(SHIFTS[SHIFTS.len() - 1] * 2.0, 0.0))).expect("same shape")
}

pub fn random_invertible<A: BanachAlgebra>(n: usize, desc: &A::Desc, rng: &mut dyn RngCore) -> Matrix<A> {
    shift_to_invertible(&random_matrix(n, desc, rng))
}

/// `G + G*` shifted by a real multiple of `I`, so it stays hermitian.
pub fn random_hermitian_invertible<A: BanachAlgebra>(
    n: usize,
    desc: &A::Desc,
    rng: &mut dyn RngCore,
) -> Option<Matrix<A>> {
    let g = random_matrix::<A>(n, desc, rng);
    let h = g.try_add(&g.star_matrix()?).expect("same shape");
    Some(shift_to_invertible(&h))
}

/// Upper-triangular `n×n` with diagonal entries whose own smallest singular
/// value is at least `diag_floor`.
pub fn random_upper_triangular(n: usize, k: usize, diag_floor: f64, rng: &mut dyn RngCore) -> Matrix<ScalarMatrix> {
    let desc = ScalarDesc { k };
    Matrix::from_fn(n, &desc, |j, l| {
        if j > l {
            ScalarMatrix::zero(&desc)
        } else if j == l {
            well_conditioned(k, diag_floor, rng)
        } else {
            ScalarMatrix::random(&desc, rng)
        }
    })
}

/// Random `k×k` matrix shifted until its smallest singular value is at
/// least `floor`.
pub fn well_conditioned(k: usize, floor: f64, rng: &mut dyn RngCore) -> ScalarMatrix {
    let g = ScalarMatrix::random(&ScalarDesc { k }, rng);
    for c in SHIFTS {
        let s = g.add_scalar(C64::new(c, 0.0));
        if singular_value_range(s.as_dense()).0 >= floor {
            return s;
        }
    }
    g.add_scalar(C64::new(2.0 * SHIFTS[SHIFTS.len() - 1], 0.0))
}

/// `u·v*`, or zero with probability `zero_prob`.
pub fn random_rank_one(k: usize, zero_prob: f64, rng: &mut dyn RngCore) -> ScalarMatrix {
    if rng.random::<f64>() < zero_prob || k == 1 {
        return ScalarMatrix::zero(&ScalarDesc { k });
    }
    let u: Vec<C64> = (0..k).map(|_| gaussian(rng)).collect();
    let v: Vec<C64> = (0..k).map(|_| gaussian(rng)).collect();
    ScalarMatrix::new(DenseMatrix::from_fn(k, k, |i, j| u[i] * v[j].conj()))
}

/// Invertible `2×2` over `M_k(C)` whose corner is singular; with
/// `all_singular` every entry is.
pub fn random_singular_corner(k: usize, all_singular: bool, rng: &mut dyn RngCore) -> Matrix<ScalarMatrix> {
    let desc = ScalarDesc { k };
    for _ in 0..256 {
        let corner = random_rank_one(k, 0.2, rng);
        let entry = |rng: &mut dyn RngCore| {
            if all_singular {
                random_rank_one(k, 0.0, rng)
            } else {
                ScalarMatrix::random(&desc, rng)
            }
        };
        let b = entry(rng);
        let c = entry(rng);
        let d = entry(rng);
        let t = Matrix::from_rows(vec![vec![corner, b], vec![c, d]]).expect("square");
        if matrix_smallest_singular_value(&t).is_some_and(|s| s > MIN_SINGULAR_VALUE) {
            return t;
        }
    }
    // Unreachable for k ≥ 1 in practice; the anti-diagonal identity is a valid fallback.
    let one = ScalarMatrix::one(&desc);
    let zero = ScalarMatrix::zero(&desc);
    Matrix::from_rows(vec![vec![zero.clone(), one.clone()], vec![one, zero]]).expect("square")
}
