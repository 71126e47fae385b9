use rand::RngCore;

use crate::algebra::{BanachAlgebra, Embedded};
use crate::error::AlgebraError;
use crate::rng::gaussian;
use crate::{DenseMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SwapDesc;

/// `C²` with componentwise product, max norm and the involution
/// `(x, y)* = (ȳ, x̄)`.
///
/// The involution is isometric but the algebra is not symmetric:
/// for `a = (2, −1/2)`, `a*a = (−1, −1)` and `1 + a*a = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapPair {
    pub x: C64,
    pub y: C64,
}

impl SwapPair {
    pub fn new(x: C64, y: C64) -> Self {
        SwapPair { x, y }
    }

    /// The element `(2, −1/2)` witnessing non-symmetry.
    pub fn witness() -> Self {
        SwapPair::new(C64::new(2.0, 0.0), C64::new(-0.5, 0.0))
    }
}

impl BanachAlgebra for SwapPair {
    type Desc = SwapDesc;

    fn descriptor(&self) -> SwapDesc {
        SwapDesc
    }

    fn zero(_desc: &SwapDesc) -> Self {
        SwapPair::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    }

    fn one(_desc: &SwapDesc) -> Self {
        SwapPair::new(C64::new(1.0, 0.0), C64::new(1.0, 0.0))
    }

    fn add(&self, rhs: &Self) -> Self {
        SwapPair::new(self.x + rhs.x, self.y + rhs.y)
    }

    fn sub(&self, rhs: &Self) -> Self {
        SwapPair::new(self.x - rhs.x, self.y - rhs.y)
    }

    fn mul(&self, rhs: &Self) -> Self {
        SwapPair::new(self.x * rhs.x, self.y * rhs.y)
    }

    fn scale(&self, s: C64) -> Self {
        SwapPair::new(self.x * s, self.y * s)
    }

    fn norm(&self) -> f64 {
        self.x.norm().max(self.y.norm())
    }

    fn involution_bound(_desc: &SwapDesc) -> Option<f64> {
        Some(1.0)
    }

    fn star(&self) -> Option<Self> {
        Some(SwapPair::new(self.y.conj(), self.x.conj()))
    }

    fn inverse(&self, tol: f64) -> Result<Self, AlgebraError> {
        let floor = 1e-14 * self.norm();
        if self.x.norm() <= floor || self.y.norm() <= floor {
            return Err(AlgebraError::NotInvertible(format!("component vanishes: {self:?}")));
        }
        let inv = SwapPair::new(self.x.inv(), self.y.inv());
        let residual = crate::algebra::two_sided_residual(self, &inv);
        if residual > tol {
            return Err(AlgebraError::NotInvertible(format!("residual {residual:e} exceeds {tol:e}")));
        }
        Ok(inv)
    }

    fn spectrum(&self) -> Option<Vec<C64>> {
        Some(vec![self.x, self.y])
    }

    fn is_inessential(&self) -> bool {
        true
    }

    fn dense_dim(_desc: &SwapDesc) -> Option<usize> {
        Some(2)
    }

    fn to_dense(&self) -> Option<DenseMatrix> {
        Some(DenseMatrix::from_row_slice(2, 2, &[self.x, C64::new(0.0, 0.0), C64::new(0.0, 0.0), self.y]))
    }

    fn from_dense(_desc: &SwapDesc, block: &DenseMatrix) -> Result<Self, AlgebraError> {
        let d = super::wiener::diagonal_of(block, 2)?;
        Ok(SwapPair::new(d[0], d[1]))
    }

    fn random(_desc: &SwapDesc, rng: &mut dyn RngCore) -> Self {
        SwapPair::new(gaussian(rng), gaussian(rng))
    }
}

impl Embedded for SwapPair {
    type Ambient = SwapPair;

    fn embed(&self) -> SwapPair {
        *self
    }

    fn ambient_descriptor(desc: &SwapDesc) -> SwapDesc {
        *desc
    }
}
