use rand::RngCore;

use super::checked_dense_inverse;
use crate::algebra::{BanachAlgebra, Embedded};
use crate::error::AlgebraError;
use crate::rng::gaussian;
use crate::{DenseMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalarDesc {
    pub k: usize,
}

/// An element of `M_k(C)` normed by its largest singular value.
///
/// `k = 1` is the field of complex scalars. Every element has finite
/// spectrum, so the whole algebra passes the inessential proxy.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarMatrix(DenseMatrix);

impl ScalarMatrix {
    pub fn new(m: DenseMatrix) -> Self {
        assert!(m.is_square(), "scalar matrix must be square");
        assert!(m.nrows() > 0, "scalar matrix must be non-empty");
        ScalarMatrix(m)
    }

    pub fn from_row_slice(k: usize, entries: &[C64]) -> Self {
        Self::new(DenseMatrix::from_row_slice(k, k, entries))
    }

    /// Real entries, row-major.
    pub fn from_real(k: usize, entries: &[f64]) -> Self {
        let c: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_row_slice(k, &c)
    }

    pub fn scalar(z: C64) -> Self {
        Self::new(DenseMatrix::from_element(1, 1, z))
    }

    pub fn k(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dense(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }
}

impl BanachAlgebra for ScalarMatrix {
    type Desc = ScalarDesc;

    fn descriptor(&self) -> ScalarDesc {
        ScalarDesc { k: self.k() }
    }

    fn zero(desc: &ScalarDesc) -> Self {
        ScalarMatrix(DenseMatrix::zeros(desc.k, desc.k))
    }

    fn one(desc: &ScalarDesc) -> Self {
        ScalarMatrix(DenseMatrix::identity(desc.k, desc.k))
    }

    fn add(&self, rhs: &Self) -> Self {
        ScalarMatrix(&self.0 + &rhs.0)
    }

    fn sub(&self, rhs: &Self) -> Self {
        ScalarMatrix(&self.0 - &rhs.0)
    }

    fn mul(&self, rhs: &Self) -> Self {
        ScalarMatrix(&self.0 * &rhs.0)
    }

    fn scale(&self, s: C64) -> Self {
        ScalarMatrix(&self.0 * s)
    }

    fn norm(&self) -> f64 {
        if self.k() == 1 {
            return self.0[(0, 0)].norm();
        }
        if self.0.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            return 0.0;
        }
        self.0.clone().singular_values().max()
    }

    fn star(&self) -> Option<Self> {
        Some(ScalarMatrix(self.0.adjoint()))
    }

    fn involution_bound(_desc: &ScalarDesc) -> Option<f64> {
        Some(1.0)
    }

    fn is_symmetric(_desc: &ScalarDesc) -> bool {
        true
    }

    fn star_is_adjoint(_desc: &ScalarDesc) -> bool {
        true
    }

    fn inverse(&self, tol: f64) -> Result<Self, AlgebraError> {
        if self.k() == 1 {
            let z = self.0[(0, 0)];
            if z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
                return Err(AlgebraError::NotInvertible("zero scalar".into()));
            }
            return Ok(ScalarMatrix::scalar(z.inv()));
        }
        checked_dense_inverse(&self.0, tol, |m| ScalarMatrix(m.clone()).norm()).map(ScalarMatrix)
    }

    fn spectrum(&self) -> Option<Vec<C64>> {
        if self.k() == 1 {
            return Some(vec![self.0[(0, 0)]]);
        }
        self.0.eigenvalues().map(|v| v.iter().copied().collect())
    }

    fn is_inessential(&self) -> bool {
        true
    }

    fn dense_dim(desc: &ScalarDesc) -> Option<usize> {
        Some(desc.k)
    }

    fn to_dense(&self) -> Option<DenseMatrix> {
        Some(self.0.clone())
    }

    fn from_dense(desc: &ScalarDesc, block: &DenseMatrix) -> Result<Self, AlgebraError> {
        if block.nrows() != desc.k || block.ncols() != desc.k {
            return Err(AlgebraError::DescriptorMismatch);
        }
        Ok(ScalarMatrix(block.clone()))
    }

    fn random(desc: &ScalarDesc, rng: &mut dyn RngCore) -> Self {
        let entries: Vec<C64> = (0..desc.k * desc.k).map(|_| gaussian(rng)).collect();
        Self::from_row_slice(desc.k, &entries)
    }
}

/// `M_k(C)` is its own ambient algebra.
impl Embedded for ScalarMatrix {
    type Ambient = ScalarMatrix;

    fn embed(&self) -> ScalarMatrix {
        self.clone()
    }

    fn ambient_descriptor(desc: &ScalarDesc) -> ScalarDesc {
        *desc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn norm_is_largest_singular_value() {
        let a = ScalarMatrix::from_real(2, &[3.0, 0.0, 0.0, -4.0]);
        assert!((a.norm() - 4.0).abs() < 1e-12);
        assert_eq!(ScalarMatrix::one(&ScalarDesc { k: 3 }).norm(), 1.0);
        assert_eq!(ScalarMatrix::zero(&ScalarDesc { k: 3 }).norm(), 0.0);
    }

    #[test]
    fn star_preserves_norm_and_reverses_products() {
        let mut rng = rng_from_seed(3);
        let d = ScalarDesc { k: 3 };
        for _ in 0..20 {
            let a = ScalarMatrix::random(&d, &mut rng);
            let b = ScalarMatrix::random(&d, &mut rng);
            let a_star = a.star().unwrap();
            assert!((a_star.norm() - a.norm()).abs() < 1e-10 * a.norm());
            let lhs = a.mul(&b).star().unwrap();
            let rhs = b.star().unwrap().mul(&a_star);
            assert!(lhs.sub(&rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_is_refused() {
        let a = ScalarMatrix::from_real(2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(a.inverse(1e-8).is_err());
        assert!(ScalarMatrix::scalar(C64::new(0.0, 0.0)).inverse(1e-8).is_err());
    }

    #[test]
    fn spectrum_of_triangular_matrix_is_its_diagonal() {
        let a = ScalarMatrix::from_real(2, &[2.0, 5.0, 0.0, -1.0]);
        let mut sp: Vec<f64> = a.spectrum().unwrap().iter().map(|z| z.re).collect();
        sp.sort_by(f64::total_cmp);
        assert!((sp[0] + 1.0).abs() < 1e-12 && (sp[1] - 2.0).abs() < 1e-12);
    }
}
