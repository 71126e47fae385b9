//! Trigonometric polynomials of degree `d` with ℓ¹-normed coefficients.
//!
//! Products fold frequencies modulo `N = 2d + 1`, so the coefficient space is
//! the group algebra `ℓ¹(Z_N)`: an honest commutative Banach algebra whose
//! Gelfand transform is evaluation on the `N`-point grid of the circle. The
//! fold is invisible as long as degrees of the factors sum to at most `d`.

use std::cell::RefCell;
use std::f64::consts::TAU;

use rand::RngCore;
use rustfft::{Fft, FftPlanner};

use crate::algebra::{BanachAlgebra, Embedded};
use crate::error::AlgebraError;
use crate::rng::gaussian;
use crate::{DenseMatrix, C64};

/// Random elements only populate frequencies up to this degree.
const RANDOM_DEGREE: usize = 3;

/// Relative floor below which a grid value counts as a zero.
const VANISHING_FLOOR: f64 = 1e-10;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft(len: usize, inverse: bool) -> std::sync::Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WienerDesc {
    pub degree: usize,
}

impl WienerDesc {
    /// Number of coefficients, which is also the number of grid points.
    pub fn len(&self) -> usize {
        2 * self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl Default for WienerDesc {
    fn default() -> Self {
        WienerDesc { degree: 64 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Wiener {
    degree: usize,
    /// `coeffs[q + d]` is the coefficient of `e^{iqt}`.
    coeffs: Vec<C64>,
}

impl Wiener {
    pub fn new(degree: usize, coeffs: Vec<C64>) -> Result<Self, AlgebraError> {
        if coeffs.len() != 2 * degree + 1 {
            return Err(AlgebraError::Payload(format!(
                "degree {degree} needs {} coefficients, got {}",
                2 * degree + 1,
                coeffs.len()
            )));
        }
        Ok(Wiener { degree, coeffs })
    }

    pub fn constant(degree: usize, c: C64) -> Self {
        let mut w = Self::zero(&WienerDesc { degree });
        w.coeffs[degree] = c;
        w
    }

    /// `c·e^{iqt}`.
    pub fn monomial(degree: usize, q: i64, c: C64) -> Self {
        let mut w = Self::zero(&WienerDesc { degree });
        w.coeffs[Self::index(degree, q)] = c;
        w
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coefficient(&self, q: i64) -> C64 {
        self.coeffs[Self::index(self.degree, q)]
    }

    fn index(degree: usize, q: i64) -> usize {
        let n = (2 * degree + 1) as i64;
        (q + degree as i64).rem_euclid(n) as usize
    }

    /// Value at angle `t` of the trigonometric polynomial.
    pub fn evaluate(&self, t: f64) -> C64 {
        let d = self.degree as i64;
        self.coeffs.iter().enumerate().map(|(i, c)| c * C64::from_polar(1.0, (i as i64 - d) as f64 * t)).sum()
    }

    /// Values at `t_g = 2πg/N`, `g = 0..N`.
    pub fn grid_values(&self) -> Vec<C64> {
        let n = self.coeffs.len();
        let mut buf = vec![C64::new(0.0, 0.0); n];
        let d = self.degree as i64;
        for (i, c) in self.coeffs.iter().enumerate() {
            buf[(i as i64 - d).rem_euclid(n as i64) as usize] = *c;
        }
        fft(n, true).process(&mut buf);
        buf
    }

    /// Inverse of [`Self::grid_values`].
    pub fn from_grid_values(degree: usize, values: &[C64]) -> Result<Self, AlgebraError> {
        let n = 2 * degree + 1;
        if values.len() != n {
            return Err(AlgebraError::Payload(format!("expected {n} grid values, got {}", values.len())));
        }
        let mut buf = values.to_vec();
        fft(n, false).process(&mut buf);
        let scale = 1.0 / n as f64;
        let coeffs = (0..n)
            .map(|i| {
                let q = i as i64 - degree as i64;
                buf[q.rem_euclid(n as i64) as usize] * scale
            })
            .collect();
        Ok(Wiener { degree, coeffs })
    }

    /// Grid points of the native evaluation grid.
    pub fn grid(degree: usize) -> Vec<f64> {
        let n = 2 * degree + 1;
        (0..n).map(|g| TAU * g as f64 / n as f64).collect()
    }
}

/// Product of two Wiener elements (frequencies folded modulo `2d + 1`).
pub fn wiener_mul(f: &Wiener, g: &Wiener) -> Result<Wiener, AlgebraError> {
    if f.degree != g.degree {
        return Err(AlgebraError::DegreeMismatch(f.degree, g.degree));
    }
    let n = f.coeffs.len();
    let d = f.degree;
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (i, a) in f.coeffs.iter().enumerate() {
        if *a == C64::new(0.0, 0.0) {
            continue;
        }
        for (j, b) in g.coeffs.iter().enumerate() {
            // (i - d) + (j - d) + d, folded into 0..n
            out[(i + j + n - d) % n] += a * b;
        }
    }
    Ok(Wiener { degree: d, coeffs: out })
}

/// Inverse by pointwise reciprocal on the evaluation grid, transformed back.
///
/// Fails with `NotInvertible` when `f` vanishes (relative to `‖f‖`) at a grid
/// point or when the residual `‖f·f⁻¹ − 1‖` exceeds `tol`.
pub fn wiener_inverse(f: &Wiener, tol: f64) -> Result<Wiener, AlgebraError> {
    let values = f.grid_values();
    let floor = VANISHING_FLOOR * f.norm();
    if let Some((g, v)) = values.iter().enumerate().find(|(_, v)| v.norm() <= floor) {
        return Err(AlgebraError::NotInvertible(format!("vanishes at grid point {g} (|f| = {:e})", v.norm())));
    }
    let recip: Vec<C64> = values.iter().map(|v| v.inv()).collect();
    let inv = Wiener::from_grid_values(f.degree, &recip)?;
    let residual = crate::algebra::two_sided_residual(f, &inv);
    if residual > tol {
        return Err(AlgebraError::NotInvertible(format!("residual {residual:e} exceeds {tol:e}")));
    }
    Ok(inv)
}

impl BanachAlgebra for Wiener {
    type Desc = WienerDesc;

    fn descriptor(&self) -> WienerDesc {
        WienerDesc { degree: self.degree }
    }

    fn zero(desc: &WienerDesc) -> Self {
        Wiener { degree: desc.degree, coeffs: vec![C64::new(0.0, 0.0); desc.len()] }
    }

    fn one(desc: &WienerDesc) -> Self {
        Wiener::constant(desc.degree, C64::new(1.0, 0.0))
    }

    fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.degree, rhs.degree, "Wiener degree mismatch");
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        Wiener { degree: self.degree, coeffs }
    }

    fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.degree, rhs.degree, "Wiener degree mismatch");
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        Wiener { degree: self.degree, coeffs }
    }

    fn mul(&self, rhs: &Self) -> Self {
        wiener_mul(self, rhs).expect("Wiener degree mismatch")
    }

    fn scale(&self, s: C64) -> Self {
        Wiener { degree: self.degree, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// `(c_q) ↦ (conj c_{-q})`, i.e. pointwise conjugation of the function.
    fn star(&self) -> Option<Self> {
        let coeffs = self.coeffs.iter().rev().map(|c| c.conj()).collect();
        Some(Wiener { degree: self.degree, coeffs })
    }

    fn involution_bound(_desc: &WienerDesc) -> Option<f64> {
        Some(1.0)
    }

    fn is_symmetric(_desc: &WienerDesc) -> bool {
        true
    }

    fn star_is_adjoint(_desc: &WienerDesc) -> bool {
        true
    }

    fn inverse(&self, tol: f64) -> Result<Self, AlgebraError> {
        wiener_inverse(self, tol)
    }

    fn spectrum(&self) -> Option<Vec<C64>> {
        Some(self.grid_values())
    }

    /// Conservative: only zero is claimed inessential.
    fn is_inessential(&self) -> bool {
        self.norm() == 0.0
    }

    fn default_tolerance(_desc: &WienerDesc) -> f64 {
        1e-6
    }

    fn dense_dim(desc: &WienerDesc) -> Option<usize> {
        Some(desc.len())
    }

    fn to_dense(&self) -> Option<DenseMatrix> {
        let v = self.grid_values();
        Some(DenseMatrix::from_diagonal(&nalgebra::DVector::from_vec(v)))
    }

    fn from_dense(desc: &WienerDesc, block: &DenseMatrix) -> Result<Self, AlgebraError> {
        let values = diagonal_of(block, desc.len())?;
        Wiener::from_grid_values(desc.degree, &values)
    }

    /// Modulus lifting: `f + eps·f/|f|` on the grid, so `|f_eps| ≥ eps`
    /// everywhere and `‖f − f_eps‖ = eps·‖f/|f|‖`.
    fn perturb_to_invertible(&self, eps: f64, tol: f64) -> Result<Self, AlgebraError> {
        let lifted: Vec<C64> = self
            .grid_values()
            .into_iter()
            .map(|v| {
                let r = v.norm();
                let phase = if r > 0.0 { v / r } else { C64::new(1.0, 0.0) };
                v + phase * eps
            })
            .collect();
        let out = Wiener::from_grid_values(self.degree, &lifted)?;
        out.inverse(tol)?;
        Ok(out)
    }

    fn random(desc: &WienerDesc, rng: &mut dyn RngCore) -> Self {
        let mut w = Wiener::zero(desc);
        let top = RANDOM_DEGREE.min(desc.degree) as i64;
        for q in -top..=top {
            w.coeffs[Self::index(desc.degree, q)] = gaussian(rng) * 0.5f64.powi(q.unsigned_abs() as i32);
        }
        w
    }
}

pub(crate) fn diagonal_of(block: &DenseMatrix, n: usize) -> Result<Vec<C64>, AlgebraError> {
    if block.nrows() != n || block.ncols() != n {
        return Err(AlgebraError::DescriptorMismatch);
    }
    let scale = block.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    for i in 0..n {
        for j in 0..n {
            if i != j && block[(i, j)].norm() > 1e-9 * scale {
                return Err(AlgebraError::Payload(format!("block is not diagonal at ({i},{j})")));
            }
        }
    }
    Ok((0..n).map(|i| block[(i, i)]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircleDesc {
    pub points: usize,
}

/// A continuous function on the circle, known through its values on the
/// uniform grid and normed by the maximum modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleFunction {
    values: Vec<C64>,
}

impl CircleFunction {
    pub fn new(values: Vec<C64>) -> Self {
        assert!(!values.is_empty());
        CircleFunction { values }
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    fn zip(&self, rhs: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(self.values.len(), rhs.values.len(), "circle grid mismatch");
        CircleFunction { values: self.values.iter().zip(&rhs.values).map(|(a, b)| f(*a, *b)).collect() }
    }
}

impl BanachAlgebra for CircleFunction {
    type Desc = CircleDesc;

    fn descriptor(&self) -> CircleDesc {
        CircleDesc { points: self.values.len() }
    }

    fn zero(desc: &CircleDesc) -> Self {
        CircleFunction { values: vec![C64::new(0.0, 0.0); desc.points] }
    }

    fn one(desc: &CircleDesc) -> Self {
        CircleFunction { values: vec![C64::new(1.0, 0.0); desc.points] }
    }

    fn add(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a + b)
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a - b)
    }

    fn mul(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a * b)
    }

    fn scale(&self, s: C64) -> Self {
        CircleFunction { values: self.values.iter().map(|v| v * s).collect() }
    }

    fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn star(&self) -> Option<Self> {
        Some(CircleFunction { values: self.values.iter().map(|v| v.conj()).collect() })
    }

    fn involution_bound(_desc: &CircleDesc) -> Option<f64> {
        Some(1.0)
    }

    fn is_symmetric(_desc: &CircleDesc) -> bool {
        true
    }

    fn star_is_adjoint(_desc: &CircleDesc) -> bool {
        true
    }

    fn inverse(&self, tol: f64) -> Result<Self, AlgebraError> {
        let floor = VANISHING_FLOOR * self.norm();
        if self.values.iter().any(|v| v.norm() <= floor) {
            return Err(AlgebraError::NotInvertible("function vanishes on the grid".into()));
        }
        let inv = CircleFunction { values: self.values.iter().map(|v| v.inv()).collect() };
        let residual = crate::algebra::two_sided_residual(self, &inv);
        if residual > tol {
            return Err(AlgebraError::NotInvertible(format!("residual {residual:e} exceeds {tol:e}")));
        }
        Ok(inv)
    }

    fn spectrum(&self) -> Option<Vec<C64>> {
        Some(self.values.clone())
    }

    fn is_inessential(&self) -> bool {
        true
    }

    fn default_tolerance(_desc: &CircleDesc) -> f64 {
        1e-6
    }

    fn dense_dim(desc: &CircleDesc) -> Option<usize> {
        Some(desc.points)
    }

    fn to_dense(&self) -> Option<DenseMatrix> {
        Some(DenseMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.values.clone())))
    }

    fn from_dense(desc: &CircleDesc, block: &DenseMatrix) -> Result<Self, AlgebraError> {
        Ok(CircleFunction { values: diagonal_of(block, desc.points)? })
    }

    fn random(desc: &CircleDesc, rng: &mut dyn RngCore) -> Self {
        CircleFunction { values: (0..desc.points).map(|_| gaussian(rng)).collect() }
    }
}

impl Embedded for Wiener {
    type Ambient = CircleFunction;

    fn embed(&self) -> CircleFunction {
        CircleFunction { values: self.grid_values() }
    }

    fn ambient_descriptor(desc: &WienerDesc) -> CircleDesc {
        CircleDesc { points: desc.len() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    const D: usize = 64;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn unit_and_monomials() {
        let desc = WienerDesc { degree: D };
        let mut rng = rng_from_seed(1);
        let f = Wiener::random(&desc, &mut rng);
        assert_eq!(wiener_mul(&f, &Wiener::one(&desc)).unwrap(), f);
        let e = Wiener::monomial(D, 1, c(1.0));
        let e_bar = Wiener::monomial(D, -1, c(1.0));
        assert_eq!(wiener_mul(&e, &e_bar).unwrap(), Wiener::one(&desc));
    }

    #[test]
    fn degree_mismatch_is_an_error() {
        let f = Wiener::one(&WienerDesc { degree: 2 });
        let g = Wiener::one(&WienerDesc { degree: 3 });
        assert_eq!(wiener_mul(&f, &g), Err(AlgebraError::DegreeMismatch(2, 3)));
    }

    #[test]
    fn product_matches_pointwise_product_on_dense_grid() {
        // Random elements have degree ≤ 3, so no frequency folding happens and
        // the product is the true product of trigonometric polynomials.
        let desc = WienerDesc { degree: D };
        let mut rng = rng_from_seed(2);
        for _ in 0..10 {
            let f = Wiener::random(&desc, &mut rng);
            let g = Wiener::random(&desc, &mut rng);
            let fg = wiener_mul(&f, &g).unwrap();
            for s in 0..1000 {
                let t = TAU * s as f64 / 1000.0;
                let err = (fg.evaluate(t) - f.evaluate(t) * g.evaluate(t)).norm();
                assert!(err < 1e-10, "err {err}");
            }
        }
    }

    #[test]
    fn grid_values_match_direct_evaluation() {
        let mut rng = rng_from_seed(5);
        let f = Wiener::random(&WienerDesc { degree: 8 }, &mut rng);
        for (g, t) in Wiener::grid(8).into_iter().enumerate() {
            assert!((f.grid_values()[g] - f.evaluate(t)).norm() < 1e-12);
        }
        let back = Wiener::from_grid_values(8, &f.grid_values()).unwrap();
        assert!(back.sub(&f).norm() < 1e-13);
    }

    #[test]
    fn inverse_of_constant() {
        let inv = wiener_inverse(&Wiener::constant(D, c(2.0)), 1e-12).unwrap();
        assert!(inv.sub(&Wiener::constant(D, c(0.5))).norm() < 1e-13);
    }

    #[test]
    fn inverse_of_two_plus_exponential_is_geometric() {
        // 1/(2 + z) = Σ_{q≥0} (−1)^q z^q / 2^{q+1}; the fold adds only 2^{-d}-size
        // aliases.
        let f = Wiener::constant(D, c(2.0)).add(&Wiener::monomial(D, 1, c(1.0)));
        let inv = wiener_inverse(&f, 1e-12).unwrap();
        for q in 0..=20i64 {
            let expected = (-1f64).powi(q as i32) / 2f64.powi(q as i32 + 1);
            assert!((inv.coefficient(q) - c(expected)).norm() < 1e-12, "q = {q}");
        }
        for q in 1..=20i64 {
            assert!(inv.coefficient(-q).norm() < 1e-12);
        }
    }

    #[test]
    fn one_minus_exponential_is_not_invertible() {
        let f = Wiener::one(&WienerDesc { degree: D }).sub(&Wiener::monomial(D, 1, c(1.0)));
        assert!(matches!(wiener_inverse(&f, 1e-8), Err(AlgebraError::NotInvertible(_))));
    }

    #[test]
    fn star_conjugates_pointwise() {
        let mut rng = rng_from_seed(9);
        let f = Wiener::random(&WienerDesc { degree: 6 }, &mut rng);
        let fs = f.star().unwrap();
        for t in [0.0, 0.4, 2.5] {
            assert!((fs.evaluate(t) - f.evaluate(t).conj()).norm() < 1e-12);
        }
        assert!((fs.norm() - f.norm()).abs() < 1e-14);
    }

    #[test]
    fn modulus_lifting_is_invertible_and_close() {
        let f = Wiener::one(&WienerDesc { degree: 8 }).sub(&Wiener::monomial(8, 1, c(1.0)));
        let unit = f.sub(&f.perturb_to_invertible(1.0, 1e-6).unwrap()).norm();
        for j in 2..=10 {
            let eps = 1.0 / j as f64;
            let g = f.perturb_to_invertible(eps, 1e-6).unwrap();
            assert!((f.sub(&g).norm() - eps * unit).abs() < 1e-12);
        }
    }

    #[test]
    fn embedding_is_contractive() {
        let desc = WienerDesc { degree: 16 };
        let mut rng = rng_from_seed(4);
        for _ in 0..200 {
            let f = Wiener::random(&desc, &mut rng);
            assert!(f.embed().norm() <= f.norm() + 1e-12);
        }
    }
}
