//! The contract every concrete Banach algebra fulfils, and the generic
//! element-level procedures built on top of it.

use std::f64::consts::PI;
use std::fmt;

use rand::RngCore;
use serde::Serialize;

use crate::error::AlgebraError;
use crate::{DenseMatrix, C64};

/// A unital Banach algebra, one value at a time.
///
/// Elements carry their own [`Self::Desc`] (dimension, degree, grid, ...) so
/// that `zero`/`one` can be produced for any operand. All operations are pure;
/// elements are immutable values.
pub trait BanachAlgebra: Clone + fmt::Debug + Send + Sync + Sized {
    type Desc: Clone + fmt::Debug + PartialEq + Send + Sync;

    fn descriptor(&self) -> Self::Desc;
    fn zero(desc: &Self::Desc) -> Self;
    fn one(desc: &Self::Desc) -> Self;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn scale(&self, s: C64) -> Self;
    fn neg(&self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }
    /// `self + s·1`.
    fn add_scalar(&self, s: C64) -> Self {
        self.add(&Self::one(&self.descriptor()).scale(s))
    }

    fn norm(&self) -> f64;

    /// The involution, or `None` when the instance declares none.
    fn star(&self) -> Option<Self> {
        None
    }

    /// Whether `1 + a*a` is invertible for every `a` in this instance.
    /// Declared `M` with `‖a*‖ ≤ M·‖a‖`, if the involution is bounded.
    fn involution_bound(_desc: &Self::Desc) -> Option<f64> {
        None
    }

    fn is_symmetric(_desc: &Self::Desc) -> bool {
        false
    }

    /// Whether the dense representation maps `a*` to the conjugate transpose
    /// of the representation of `a`.
    fn star_is_adjoint(_desc: &Self::Desc) -> bool {
        false
    }

    /// The instance's own inversion routine. Succeeds only when the two-sided
    /// residual `max(‖a·s − 1‖, ‖s·a − 1‖)` is at most `tol`.
    fn inverse(&self, tol: f64) -> Result<Self, AlgebraError>;

    /// Spectrum when it is cheaply computable (eigenvalues, grid values).
    fn spectrum(&self) -> Option<Vec<C64>> {
        None
    }

    /// Desk proxy for membership in the largest inessential ideal.
    fn is_inessential(&self) -> bool;

    fn default_tolerance(_desc: &Self::Desc) -> f64 {
        1e-8
    }

    /// Side length of the square dense block representing one element, if the
    /// instance is scalar- or grid-backed.
    fn dense_dim(_desc: &Self::Desc) -> Option<usize> {
        None
    }

    /// Faithful dense representation as a complex matrix.
    fn to_dense(&self) -> Option<DenseMatrix> {
        None
    }

    fn from_dense(_desc: &Self::Desc, _block: &DenseMatrix) -> Result<Self, AlgebraError> {
        Err(AlgebraError::NotSupported("dense representation"))
    }

    /// An invertible element within distance proportional to `eps`.
    ///
    /// The default shifts by `eps·e^{iθ}·1`. With a known spectrum `θ` is the
    /// ray angle farthest from `−σ(a)`, so successive calls with shrinking
    /// `eps` move along one ray; every candidate is verified by
    /// [`Self::inverse`].
    fn perturb_to_invertible(&self, eps: f64, tol: f64) -> Result<Self, AlgebraError> {
        let mut angles = candidate_angles(16);
        if let Some(sp) = self.spectrum() {
            angles.insert(0, ray_angle(&sp));
        }
        for theta in angles {
            let candidate = self.add_scalar(C64::from_polar(eps, theta));
            if candidate.inverse(tol).is_ok() {
                return Ok(candidate);
            }
        }
        Err(AlgebraError::NotInvertible(format!("no shift of modulus {eps:e} produced an invertible element")))
    }

    /// A random element, used by the experiment suites and property tests.
    fn random(desc: &Self::Desc, rng: &mut dyn RngCore) -> Self;
}

/// A subalgebra `A` continuously embedded in an ambient algebra `B`.
pub trait Embedded: BanachAlgebra {
    type Ambient: BanachAlgebra;

    fn embed(&self) -> Self::Ambient;

    fn ambient_descriptor(desc: &Self::Desc) -> <Self::Ambient as BanachAlgebra>::Desc;

    /// `J` with `J·‖a‖_A ≥ ‖a‖_B`.
    fn embedding_constant(_desc: &Self::Desc) -> f64 {
        1.0
    }
}

/// `θ_j = 2πj/count`, starting at zero.
pub(crate) fn candidate_angles(count: usize) -> Vec<f64> {
    (0..count).map(|j| 2.0 * PI * j as f64 / count as f64).collect()
}

/// The candidate angle scoring highest; ties go to the smallest angle, so a
/// spectrum at the origin yields real positive shifts.
fn first_best(score: impl Fn(f64) -> f64) -> f64 {
    let mut best = (0.0, f64::NEG_INFINITY);
    for t in candidate_angles(64) {
        let s = score(t);
        if s > best.1 {
            best = (t, s);
        }
    }
    best.0
}

/// `min_s |λ + s|`: how far `λ + a` is from singular when `σ(a) = spectrum`.
pub(crate) fn distance_to_negated(spectrum: &[C64], lambda: C64) -> f64 {
    spectrum.iter().map(|s| (lambda + s).norm()).fold(f64::INFINITY, f64::min)
}

/// Angle maximizing the distance of `magnitude·e^{iθ}` from `-spectrum`.
pub(crate) fn best_angle(spectrum: &[C64], magnitude: f64) -> f64 {
    first_best(|t| distance_to_negated(spectrum, C64::from_polar(magnitude, t)))
}

/// Angle of the ray `{r·e^{iθ} : r > 0}` farthest in angle from every
/// nonzero point of `−spectrum`.
pub(crate) fn ray_angle(spectrum: &[C64]) -> f64 {
    let scale = spectrum.iter().map(|s| s.norm()).fold(0.0, f64::max);
    let args: Vec<f64> = spectrum.iter().filter(|s| s.norm() > 1e-12 * scale).map(|s| (-s).arg()).collect();
    let gap = |t: f64| {
        args.iter()
            .map(|a| {
                let d = (t - a).rem_euclid(2.0 * PI);
                d.min(2.0 * PI - d)
            })
            .fold(PI, f64::min)
    };
    first_best(gap)
}

/// Two-sided residual `max(‖a·s − 1‖, ‖s·a − 1‖)`.
pub fn two_sided_residual<A: BanachAlgebra>(a: &A, s: &A) -> f64 {
    let one = A::one(&a.descriptor());
    let right = a.mul(s).sub(&one).norm();
    let left = s.mul(a).sub(&one).norm();
    right.max(left)
}

/// Inverse of `a` by the series `Σ (1 − a)^k`.
///
/// Requires `‖1 − a‖ < 1`; callers shift or scale first otherwise.
pub fn neumann_inverse<A: BanachAlgebra>(a: &A, tol: f64, max_terms: usize) -> Result<A, AlgebraError> {
    let one = A::one(&a.descriptor());
    let defect = one.sub(a);
    let ratio = defect.norm();
    if ratio >= 1.0 {
        return Err(AlgebraError::NotConvergent(format!("‖1 − a‖ = {ratio} ≥ 1")));
    }
    let mut sum = one.clone();
    let mut term = one;
    for _ in 0..=max_terms {
        if two_sided_residual(a, &sum) <= tol {
            return Ok(sum);
        }
        term = term.mul(&defect);
        sum = sum.add(&term);
    }
    Err(AlgebraError::NotConvergent(format!("tolerance {tol:e} unmet after {max_terms} terms")))
}

/// Spectral-radius estimates of one element, optionally in two algebras.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub label: String,
    pub norm: f64,
    /// `(N, ln ‖a^N‖)`; `-inf` once a power vanishes.
    pub log_norms: Vec<(u64, f64)>,
    /// `(N, ‖a^N‖^{1/N})`.
    pub rho: Vec<(u64, f64)>,
    pub radius_a: f64,
    pub radius_b: Option<f64>,
    pub converged: bool,
    pub discrepancy: Option<f64>,
}

/// Gelfand estimate of the spectral radius from the norms `‖a^N‖`,
/// `N = 2, 4, …, n_max`, computed by repeated squaring.
///
/// Powers are renormalised after every squaring and the norms kept as
/// logarithms, so no intermediate over- or underflows. The final estimate is
/// `‖a^{2N}‖^{1/2N} · clamp((‖a^{2N}‖/‖a^N‖²)^{1/2N}, 1/2, 2)` at `2N = n_max`.
pub fn gelfand_radius<A: BanachAlgebra>(a: &A, n_max: usize) -> Result<SpectralReport, AlgebraError> {
    if n_max < 4 || !n_max.is_power_of_two() {
        return Err(AlgebraError::BadPowerCount(n_max));
    }
    let norm = a.norm();
    if !norm.is_finite() {
        return Err(AlgebraError::Overflow);
    }
    let mut log_norms = Vec::new();
    let mut rho = Vec::new();
    let mut vanished = norm == 0.0;
    let mut log_prev = norm.ln();
    let mut power = if vanished { a.clone() } else { a.scale(C64::new(1.0 / norm, 0.0)) };
    let mut exponent = 1u64;
    while (exponent as usize) < n_max {
        exponent *= 2;
        let log_norm = if vanished {
            f64::NEG_INFINITY
        } else {
            let squared = power.mul(&power);
            let s = squared.norm();
            if !s.is_finite() {
                return Err(AlgebraError::Overflow);
            }
            if s == 0.0 {
                vanished = true;
                f64::NEG_INFINITY
            } else {
                power = squared.scale(C64::new(1.0 / s, 0.0));
                2.0 * log_prev + s.ln()
            }
        };
        log_norms.push((exponent, log_norm));
        rho.push((exponent, (log_norm / exponent as f64).exp()));
        log_prev = log_norm;
    }

    let (radius, converged) = if vanished {
        (0.0, true)
    } else {
        let k = log_norms.len();
        let (big, log_big) = log_norms[k - 1];
        let (_, log_half) = log_norms[k - 2];
        let base = log_big / big as f64;
        let correction = ((log_big - 2.0 * log_half) / big as f64).exp().clamp(0.5, 2.0);
        let estimate = base.exp() * correction;
        let prev = rho[k - 2].1;
        let last = rho[k - 1].1;
        let converged = (last - prev).abs() <= 1e-2 * last.max(f64::MIN_POSITIVE);
        (estimate, converged)
    };

    Ok(SpectralReport {
        label: String::new(),
        norm,
        log_norms,
        rho,
        radius_a: radius,
        radius_b: None,
        converged,
        discrepancy: None,
    })
}

/// Invertible elements `a_1, …, a_m` converging to `a`, with
/// `‖a − a_j‖` proportional to `1/j`. An invertible `a` yields the constant
/// sequence.
pub fn approximate_by_invertibles<A: BanachAlgebra>(a: &A, m: usize) -> Result<Vec<A>, AlgebraError> {
    let tol = A::default_tolerance(&a.descriptor());
    if a.inverse(tol).is_ok() {
        return Ok(vec![a.clone(); m]);
    }
    (1..=m).map(|j| a.perturb_to_invertible(1.0 / j as f64, tol)).collect()
}

/// Result of testing whether `1 + a*a` is invertible.
#[derive(Debug, Clone)]
pub struct SymmetricWitness<A> {
    pub ok: bool,
    /// `(1 + a*a)^{-1}` when it exists.
    pub witness: Option<A>,
    /// `‖1 + a*a‖` when the inverse failed, the inverse's residual otherwise.
    pub residual: f64,
    pub reason: Option<String>,
}

pub fn symmetric_witness_check<A: BanachAlgebra>(a: &A) -> Result<SymmetricWitness<A>, AlgebraError> {
    let star = a.star().ok_or(AlgebraError::NoInvolution)?;
    let desc = a.descriptor();
    let shifted = A::one(&desc).add(&star.mul(a));
    match shifted.inverse(A::default_tolerance(&desc)) {
        Ok(inv) => {
            let residual = two_sided_residual(&shifted, &inv);
            Ok(SymmetricWitness { ok: true, witness: Some(inv), residual, reason: None })
        }
        Err(e) => {
            Ok(SymmetricWitness { ok: false, witness: None, residual: shifted.norm(), reason: Some(e.to_string()) })
        }
    }
}
