//! Discretized Hille–Tamarkin kernel operators on `L^∞([0,1])`.
//!
//! A kernel is sampled on a quadrature grid `y_1..y_m` with weights `μ_j`;
//! `T_K f(y_i) = Σ_j K(i,j) f(y_j) μ_j`. The unitization `c·I + T_K` is the
//! subalgebra `A`; dense operators on grid functions with the `ℓ^∞` operator
//! norm play the ambient `B`.

use std::sync::Arc;

use rand::RngCore;

use super::{checked_dense_inverse, max_row_sum};
use crate::algebra::{BanachAlgebra, Embedded};
use crate::error::AlgebraError;
use crate::rng::gaussian;
use crate::{DenseMatrix, C64};

#[derive(Debug)]
struct Quadrature {
    points: Vec<f64>,
    weights: Vec<f64>,
}

/// Shared quadrature grid. Cloning is cheap.
#[derive(Debug, Clone)]
pub struct HtDesc(Arc<Quadrature>);

impl PartialEq for HtDesc {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.points == other.0.points && self.0.weights == other.0.weights)
    }
}

impl HtDesc {
    /// Midpoint rule with `m` points on `[0,1]`.
    pub fn uniform(m: usize) -> Self {
        assert!(m > 0);
        let points = (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect();
        let weights = vec![1.0 / m as f64; m];
        HtDesc(Arc::new(Quadrature { points, weights }))
    }

    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self, AlgebraError> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(AlgebraError::Payload("grid and weights must be non-empty and equally long".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(AlgebraError::Payload("quadrature weights must be positive".into()));
        }
        Ok(HtDesc(Arc::new(Quadrature { points, weights })))
    }

    pub fn m(&self) -> usize {
        self.0.points.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.0.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.0.weights
    }

    pub fn is_uniform(&self) -> bool {
        let w0 = self.0.weights[0];
        self.0.weights.iter().all(|w| (w - w0).abs() <= 1e-15 * w0)
    }
}

/// Kernel samples `K(y_i, y_j)` on a quadrature grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HtKernel {
    desc: HtDesc,
    samples: DenseMatrix,
}

impl HtKernel {
    pub fn new(desc: HtDesc, samples: DenseMatrix) -> Result<Self, AlgebraError> {
        let m = desc.m();
        if samples.nrows() != m || samples.ncols() != m {
            return Err(AlgebraError::GridMismatch);
        }
        Ok(HtKernel { desc, samples })
    }

    pub fn zero(desc: &HtDesc) -> Self {
        let m = desc.m();
        HtKernel { desc: desc.clone(), samples: DenseMatrix::zeros(m, m) }
    }

    pub fn from_fn(desc: &HtDesc, k: impl Fn(f64, f64) -> C64) -> Self {
        let p = desc.points();
        let samples = DenseMatrix::from_fn(p.len(), p.len(), |i, j| k(p[i], p[j]));
        HtKernel { desc: desc.clone(), samples }
    }

    pub fn random(desc: &HtDesc, rng: &mut dyn RngCore) -> Self {
        let m = desc.m();
        let entries: Vec<C64> = (0..m * m).map(|_| gaussian(rng)).collect();
        HtKernel { desc: desc.clone(), samples: DenseMatrix::from_row_slice(m, m, &entries) }
    }

    pub fn desc(&self) -> &HtDesc {
        &self.desc
    }

    pub fn samples(&self) -> &DenseMatrix {
        &self.samples
    }

    /// `|||K|||_∞ = max_i Σ_j |K(i,j)| μ_j`.
    pub fn norm(&self) -> f64 {
        let w = self.desc.weights();
        self.samples.row_iter().map(|r| r.iter().zip(w).map(|(z, wj)| z.norm() * wj).sum::<f64>()).fold(0.0, f64::max)
    }

    /// The operator matrix `K·diag(μ)` acting on grid values.
    pub fn weighted(&self) -> DenseMatrix {
        let mut out = self.samples.clone();
        for (j, mut col) in out.column_iter_mut().enumerate() {
            col *= C64::new(self.desc.weights()[j], 0.0);
        }
        out
    }

    /// `T_K f` on the grid.
    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        let v = nalgebra::DVector::from_column_slice(f);
        (self.weighted() * v).iter().copied().collect()
    }

    /// Kernel of `T_{self} ∘ T_{other}`: `Σ_l K1(i,l) K2(l,j) μ_l`.
    pub fn compose(&self, other: &HtKernel) -> Result<HtKernel, AlgebraError> {
        if self.desc != other.desc {
            return Err(AlgebraError::GridMismatch);
        }
        Ok(HtKernel { desc: self.desc.clone(), samples: self.weighted() * &other.samples })
    }

    /// `K†(i,j) = conj K(j,i) · μ_j/μ_i`.
    pub fn adjoint(&self) -> HtKernel {
        let w = self.desc.weights();
        let m = w.len();
        let samples = DenseMatrix::from_fn(m, m, |i, j| self.samples[(j, i)].conj() * (w[j] / w[i]));
        HtKernel { desc: self.desc.clone(), samples }
    }

    fn map(&self, f: impl Fn(&DenseMatrix) -> DenseMatrix) -> HtKernel {
        HtKernel { desc: self.desc.clone(), samples: f(&self.samples) }
    }
}

pub fn ht_compose(k1: &HtKernel, k2: &HtKernel) -> Result<HtKernel, AlgebraError> {
    k1.compose(k2)
}

/// `c·I + T_K`, normed by `|c| + |||K|||_∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitizedHt {
    c: C64,
    kernel: HtKernel,
}

impl UnitizedHt {
    pub fn new(c: C64, kernel: HtKernel) -> Self {
        UnitizedHt { c, kernel }
    }

    pub fn scalar_part(&self) -> C64 {
        self.c
    }

    pub fn kernel(&self) -> &HtKernel {
        &self.kernel
    }

    /// `c·I + K·diag(μ)` as an `m×m` operator on grid functions.
    pub fn operator(&self) -> DenseMatrix {
        let m = self.kernel.desc.m();
        self.kernel.weighted() + DenseMatrix::identity(m, m) * self.c
    }
}

/// Inverse of `c·I + T_K` computed densely in the ambient algebra and read
/// back as `c⁻¹·I + T_{K'}`.
///
/// The scalar part of the inverse is forced to `c⁻¹` by the character
/// `c·I + T_K ↦ c`; the kernel part is what remains after removing it.
pub fn ht_unitized_inverse(u: &UnitizedHt, tol: f64) -> Result<UnitizedHt, AlgebraError> {
    if u.c.norm() <= f64::EPSILON * u.kernel.norm() || u.c.norm() == 0.0 {
        return Err(AlgebraError::ZeroScalarPart);
    }
    let op = u.operator();
    let inv_op = checked_dense_inverse(&op, tol, max_row_sum)?;
    let c_inv = u.c.inv();
    let m = op.nrows();
    let mut kernel = inv_op - DenseMatrix::identity(m, m) * c_inv;
    for (j, mut col) in kernel.column_iter_mut().enumerate() {
        col *= C64::new(1.0 / u.kernel.desc.weights()[j], 0.0);
    }
    let out = UnitizedHt { c: c_inv, kernel: HtKernel { desc: u.kernel.desc.clone(), samples: kernel } };
    if !out.norm().is_finite() {
        return Err(AlgebraError::SingularToWorkingPrecision);
    }
    let residual = crate::algebra::two_sided_residual(u, &out);
    if residual > tol {
        return Err(AlgebraError::NotInvertible(format!("residual {residual:e} exceeds {tol:e}")));
    }
    Ok(out)
}

impl BanachAlgebra for UnitizedHt {
    type Desc = HtDesc;

    fn descriptor(&self) -> HtDesc {
        self.kernel.desc.clone()
    }

    fn zero(desc: &HtDesc) -> Self {
        UnitizedHt { c: C64::new(0.0, 0.0), kernel: HtKernel::zero(desc) }
    }

    fn one(desc: &HtDesc) -> Self {
        UnitizedHt { c: C64::new(1.0, 0.0), kernel: HtKernel::zero(desc) }
    }

    fn add(&self, rhs: &Self) -> Self {
        UnitizedHt { c: self.c + rhs.c, kernel: self.kernel.map(|k| k + &rhs.kernel.samples) }
    }

    fn sub(&self, rhs: &Self) -> Self {
        UnitizedHt { c: self.c - rhs.c, kernel: self.kernel.map(|k| k - &rhs.kernel.samples) }
    }

    /// `(c1 + K1)(c2 + K2) = c1c2 + (c1K2 + c2K1 + K1∘K2)`.
    fn mul(&self, rhs: &Self) -> Self {
        let composed = self.kernel.compose(&rhs.kernel).expect("kernel grid mismatch");
        let samples = composed.samples + &rhs.kernel.samples * self.c + &self.kernel.samples * rhs.c;
        UnitizedHt { c: self.c * rhs.c, kernel: HtKernel { desc: self.kernel.desc.clone(), samples } }
    }

    fn scale(&self, s: C64) -> Self {
        UnitizedHt { c: self.c * s, kernel: self.kernel.map(|k| k * s) }
    }

    fn norm(&self) -> f64 {
        self.c.norm() + self.kernel.norm()
    }

    fn star(&self) -> Option<Self> {
        Some(UnitizedHt { c: self.c.conj(), kernel: self.kernel.adjoint() })
    }

    /// `Σ_j μ_j² / min μ²`: the weighted adjoint turns row sums into column
    /// sums, which is `m` on a uniform grid.
    fn involution_bound(desc: &HtDesc) -> Option<f64> {
        let w = desc.weights();
        let min = w.iter().copied().fold(f64::INFINITY, f64::min);
        Some((w.iter().map(|x| x * x).sum::<f64>() / (min * min)).max(1.0))
    }

    fn is_symmetric(desc: &HtDesc) -> bool {
        desc.is_uniform()
    }

    fn star_is_adjoint(desc: &HtDesc) -> bool {
        desc.is_uniform()
    }

    fn inverse(&self, tol: f64) -> Result<Self, AlgebraError> {
        ht_unitized_inverse(self, tol)
    }

    /// Pure kernels (zero scalar part) stand in for compact operators.
    fn is_inessential(&self) -> bool {
        self.c == C64::new(0.0, 0.0)
    }

    fn default_tolerance(_desc: &HtDesc) -> f64 {
        1e-6
    }

    /// The character `c` in the corner, then the operator.
    fn dense_dim(desc: &HtDesc) -> Option<usize> {
        Some(desc.m() + 1)
    }

    fn to_dense(&self) -> Option<DenseMatrix> {
        let m = self.kernel.desc.m();
        let mut d = DenseMatrix::zeros(m + 1, m + 1);
        d[(0, 0)] = self.c;
        d.view_mut((1, 1), (m, m)).copy_from(&self.operator());
        Some(d)
    }

    fn from_dense(desc: &HtDesc, block: &DenseMatrix) -> Result<Self, AlgebraError> {
        let m = desc.m();
        if block.nrows() != m + 1 || block.ncols() != m + 1 {
            return Err(AlgebraError::DescriptorMismatch);
        }
        let scale = block.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        for i in 1..=m {
            if block[(0, i)].norm() > 1e-9 * scale || block[(i, 0)].norm() > 1e-9 * scale {
                return Err(AlgebraError::Payload("character coordinate is coupled to the operator".into()));
            }
        }
        let c = block[(0, 0)];
        let mut kernel: DenseMatrix = block.view((1, 1), (m, m)) - DenseMatrix::identity(m, m) * c;
        for (j, mut col) in kernel.column_iter_mut().enumerate() {
            col *= C64::new(1.0 / desc.weights()[j], 0.0);
        }
        Ok(UnitizedHt { c, kernel: HtKernel { desc: desc.clone(), samples: kernel } })
    }

    fn random(desc: &HtDesc, rng: &mut dyn RngCore) -> Self {
        let c = gaussian(rng);
        UnitizedHt { c, kernel: HtKernel::random(desc, rng) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridOperatorDesc {
    pub m: usize,
}

/// Bounded operator on grid functions with the `ℓ^∞ → ℓ^∞` norm.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOperator(DenseMatrix);

impl GridOperator {
    pub fn new(m: DenseMatrix) -> Self {
        assert!(m.is_square());
        GridOperator(m)
    }

    pub fn as_dense(&self) -> &DenseMatrix {
        &self.0
    }
}

impl BanachAlgebra for GridOperator {
    type Desc = GridOperatorDesc;

    fn descriptor(&self) -> GridOperatorDesc {
        GridOperatorDesc { m: self.0.nrows() }
    }

    fn zero(desc: &GridOperatorDesc) -> Self {
        GridOperator(DenseMatrix::zeros(desc.m, desc.m))
    }

    fn one(desc: &GridOperatorDesc) -> Self {
        GridOperator(DenseMatrix::identity(desc.m, desc.m))
    }

    fn add(&self, rhs: &Self) -> Self {
        GridOperator(&self.0 + &rhs.0)
    }

    fn sub(&self, rhs: &Self) -> Self {
        GridOperator(&self.0 - &rhs.0)
    }

    fn mul(&self, rhs: &Self) -> Self {
        GridOperator(&self.0 * &rhs.0)
    }

    fn scale(&self, s: C64) -> Self {
        GridOperator(&self.0 * s)
    }

    fn norm(&self) -> f64 {
        max_row_sum(&self.0)
    }

    fn inverse(&self, tol: f64) -> Result<Self, AlgebraError> {
        checked_dense_inverse(&self.0, tol, max_row_sum).map(GridOperator)
    }

    fn is_inessential(&self) -> bool {
        true
    }

    fn default_tolerance(_desc: &GridOperatorDesc) -> f64 {
        1e-6
    }

    fn dense_dim(desc: &GridOperatorDesc) -> Option<usize> {
        Some(desc.m)
    }

    fn to_dense(&self) -> Option<DenseMatrix> {
        Some(self.0.clone())
    }

    fn from_dense(desc: &GridOperatorDesc, block: &DenseMatrix) -> Result<Self, AlgebraError> {
        if block.nrows() != desc.m || block.ncols() != desc.m {
            return Err(AlgebraError::DescriptorMismatch);
        }
        Ok(GridOperator(block.clone()))
    }

    fn random(desc: &GridOperatorDesc, rng: &mut dyn RngCore) -> Self {
        let entries: Vec<C64> = (0..desc.m * desc.m).map(|_| gaussian(rng)).collect();
        GridOperator(DenseMatrix::from_row_slice(desc.m, desc.m, &entries))
    }
}

impl Embedded for UnitizedHt {
    type Ambient = GridOperator;

    fn embed(&self) -> GridOperator {
        GridOperator(self.operator())
    }

    fn ambient_descriptor(desc: &HtDesc) -> GridOperatorDesc {
        GridOperatorDesc { m: desc.m() }
    }
}
