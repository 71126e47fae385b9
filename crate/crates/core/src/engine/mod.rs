//! Constructive inversion algorithms over `M_n(A)` and the dense oracle used
//! to check them.
//!
//! Every algorithm reduces its input by a sequence of [`GlPair`]s to a
//! triangular matrix `S`, inverts `S` by back substitution over `A`, and
//! recomposes `T⁻¹ = W_1⋯W_k · S⁻¹ · V_k⋯V_1`. When a pivot is singular the
//! algorithms perturb it towards invertibility and take the limit of the
//! perturbed inverses under a Cauchy test.

mod elimination;
mod hermitian;
mod interchange;
mod oracle;
mod triangular;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use elimination::{thm6_invert, InessentialMask};
pub use hermitian::invert_hermitian_symmetric;
pub use interchange::{interchange_inverse, prop4_invert_2x2};
pub use oracle::{dense_inverse_partial_pivoting, oracle_certificate, oracle_invert};
pub use triangular::{invert_upper_triangular, triangular_certificate};

use crate::algebra::{best_angle, ray_angle, BanachAlgebra};
use crate::error::EngineError;
use crate::matrix::{inverse_residuals, GlPair, Matrix};
use crate::rng::uniform_angle;
use crate::C64;

/// Inverts a single entry of the matrix.
pub type EntryInverter<'a, A> = dyn Fn(&A) -> Result<A, EngineError> + 'a;

/// Produces an invertible element within `eps` of the given one.
pub type Approximant<'a, A> = dyn Fn(&A, f64) -> Result<A, EngineError> + 'a;

/// How the inverse was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathTag {
    Direct,
    Interchange,
    PerturbedLimit,
}

impl fmt::Display for PathTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathTag::Direct => "direct",
            PathTag::Interchange => "interchange",
            PathTag::PerturbedLimit => "perturbed-limit",
        })
    }
}

impl PathTag {
    fn join(self, other: PathTag) -> PathTag {
        self.max(other)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Triangular,
    Prop4,
    Thm6,
    Hermitian,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Triangular, Method::Prop4, Method::Thm6, Method::Hermitian, Method::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Method::Triangular => "triangular",
            Method::Prop4 => "prop4",
            Method::Thm6 => "thm6",
            Method::Hermitian => "hermitian",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method '{s}' (expected triangular, prop4, thm6, hermitian or oracle)"))
    }
}

/// Rules for choosing the scalar shifts `λ` that make pivots invertible.
#[derive(Debug, Clone)]
pub struct PivotStrategy {
    /// Moduli tried, in order, for the shift `λ` of the 2×2 procedure.
    pub magnitudes: Vec<f64>,
    /// Random angles tried when the pivot's spectrum is unknown.
    pub retry_budget: usize,
    /// Terms allowed in a perturbed-limit sequence.
    pub limit_budget: usize,
    /// Modulus of the first perturbation in a limit sequence.
    pub limit_start: f64,
    /// Ratio between successive perturbation moduli.
    pub limit_ratio: f64,
    /// Residual accepted from an entry-level inverse.
    pub entry_tol: f64,
    pub seed: u64,
}

impl Default for PivotStrategy {
    fn default() -> Self {
        PivotStrategy {
            magnitudes: (1..=8).map(|j| 0.5f64.powi(j)).collect(),
            retry_budget: 32,
            limit_budget: 64,
            limit_start: 0.5,
            limit_ratio: 0.5,
            entry_tol: 1e-6,
            seed: 0x5eed,
        }
    }
}

impl PivotStrategy {
    /// Candidate shifts `λ` for making `pivot + λ` invertible.
    ///
    /// With a known spectrum each modulus gets the angle farthest from the
    /// negated spectrum; otherwise angles are drawn from a seeded generator.
    pub fn lambda_candidates<A: BanachAlgebra>(&self, pivot: &A) -> Vec<C64> {
        match pivot.spectrum() {
            Some(sp) => self.magnitudes.iter().map(|&r| C64::from_polar(r, best_angle(&sp, r))).collect(),
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                (0..self.retry_budget)
                    .map(|i| {
                        let r = self.magnitudes[i % self.magnitudes.len()];
                        C64::from_polar(r, uniform_angle(&mut rng))
                    })
                    .collect()
            }
        }
    }

    pub fn limit_modulus(&self, m: usize) -> f64 {
        self.limit_start * self.limit_ratio.powi(m as i32)
    }

    /// The `m`-th shift `λ_m` of a perturbed-limit sequence. All shifts lie
    /// on one ray, so the perturbed inverses are analytic in `|λ_m|`.
    pub fn limit_lambda<A: BanachAlgebra>(&self, pivot: &A, m: usize) -> C64 {
        let theta = match pivot.spectrum() {
            Some(sp) => ray_angle(&sp),
            None => uniform_angle(&mut ChaCha8Rng::seed_from_u64(self.seed)),
        };
        C64::from_polar(self.limit_modulus(m), theta)
    }
}

/// An inverse together with the evidence of how it was obtained.
#[derive(Debug, Clone)]
pub struct InversionCertificate<A: BanachAlgebra> {
    pub method: Method,
    pub path: PathTag,
    pub input: Matrix<A>,
    /// Matrix the factors act on: the input, its padding, or a perturbation of
    /// either on limit paths.
    pub source: Matrix<A>,
    pub factors: Vec<GlPair<A>>,
    /// Triangular matrix reached by the factors.
    pub reduced: Matrix<A>,
    pub inverse: Matrix<A>,
    /// `‖T⁻¹·T − I‖`.
    pub residual_left: f64,
    /// `‖T·T⁻¹ − I‖`.
    pub residual_right: f64,
    pub tolerance: f64,
    pub padded_to: Option<usize>,
    pub nest_levels: usize,
    pub limit_terms: usize,
    pub lambdas: Vec<C64>,
}

impl<A: BanachAlgebra> InversionCertificate<A> {
    pub fn residual(&self) -> f64 {
        self.residual_left.max(self.residual_right)
    }

    /// Applies the recorded factors to the source.
    pub fn replay(&self) -> Result<Matrix<A>, EngineError> {
        let mut cur = self.source.clone();
        for f in &self.factors {
            cur = f.apply(&cur)?;
        }
        Ok(cur)
    }

    /// `‖replay() − reduced‖`.
    pub fn replay_error(&self) -> Result<f64, EngineError> {
        Ok(self.replay()?.try_sub(&self.reduced)?.mat_norm())
    }

    /// Distance between the source and the (padded) input.
    pub fn perturbation(&self) -> f64 {
        let base = match self.padded_to {
            Some(n) => crate::matrix::pad_matrix(&self.input, n).expect("padding recorded with a valid size"),
            None => self.input.clone(),
        };
        base.try_sub(&self.source).map(|d| d.mat_norm()).unwrap_or(f64::NAN)
    }
}

/// Intermediate result shared by the algorithms.
#[derive(Debug, Clone)]
pub(crate) struct Reduction<A: BanachAlgebra> {
    pub source: Matrix<A>,
    pub factors: Vec<GlPair<A>>,
    pub reduced: Matrix<A>,
    pub inverse: Matrix<A>,
    pub path: PathTag,
    pub limit_terms: usize,
    pub lambdas: Vec<C64>,
}

impl<A: BanachAlgebra> Reduction<A> {
    fn reversed(self) -> Self {
        Reduction {
            source: self.source.reversed(),
            factors: self.factors.iter().map(GlPair::reversed).collect(),
            reduced: self.reduced.reversed(),
            inverse: self.inverse.reversed(),
            ..self
        }
    }
}

impl<A: BanachAlgebra> Reduction<Matrix<A>> {
    fn unnest(self) -> Reduction<A> {
        use crate::matrix::unnest;
        Reduction {
            source: unnest(&self.source),
            factors: self.factors.iter().map(GlPair::unnest).collect(),
            reduced: unnest(&self.reduced),
            inverse: unnest(&self.inverse),
            path: self.path,
            limit_terms: self.limit_terms,
            lambdas: self.lambdas,
        }
    }
}

/// `W_1⋯W_k · S⁻¹ · V_k⋯V_1`.
pub(crate) fn compose_inverse<A: BanachAlgebra>(
    factors: &[GlPair<A>],
    reduced_inverse: &Matrix<A>,
) -> Result<Matrix<A>, EngineError> {
    let mut out = reduced_inverse.clone();
    for f in factors.iter().rev() {
        out = f.w.try_mul(&out)?.try_mul(&f.v)?;
    }
    Ok(out)
}

pub(crate) fn max_residual<A: BanachAlgebra>(t: &Matrix<A>, x: &Matrix<A>) -> f64 {
    let (l, r) = inverse_residuals(t, x);
    l.max(r)
}

/// Newton–Schulz steps `X ← X + X(I − S·X)` while the residual shrinks.
///
/// Terms of a perturbed limit pass through pivots of size `|λ_m|`, so their
/// rounding error grows like `1/|λ_m|²` although `S` itself stays well
/// conditioned; a few steps against `S` remove that error.
pub(crate) fn polish_inverse<A: BanachAlgebra>(s: &Matrix<A>, x: Matrix<A>) -> Matrix<A> {
    let id = Matrix::identity(s.n(), s.inner_desc());
    let mut best = x;
    let mut res = max_residual(s, &best);
    for _ in 0..3 {
        let Ok(candidate) = s
            .try_mul(&best)
            .and_then(|sx| id.try_sub(&sx))
            .and_then(|r| best.try_mul(&r))
            .and_then(|xr| best.try_add(&xr))
        else {
            break;
        };
        let r = max_residual(s, &candidate);
        if !(r < res) {
            break;
        }
        best = candidate;
        res = r;
    }
    best
}

/// Deepest Richardson column kept when accelerating a limit.
const EXTRAPOLATION_DEPTH: usize = 6;

/// Limit of the inverses produced by `term(0), term(1), …`.
///
/// The perturbations shrink geometrically by `ratio`, so the raw terms are
/// accelerated by Richardson extrapolation in powers of the perturbation
/// size. The estimate is accepted once it differs from its predecessor by
/// less than `tol/4` and inverts `target` with residual below `tol`. Failing
/// terms (non-invertible perturbations) restart the extrapolation table and
/// count against the budget.
pub(crate) fn limit_of_inverses<A: BanachAlgebra>(
    target: &Matrix<A>,
    tol: f64,
    budget: usize,
    ratio: f64,
    mut term: impl FnMut(usize) -> Result<Reduction<A>, EngineError>,
) -> Result<(Reduction<A>, usize), EngineError> {
    let mut table: Vec<Matrix<A>> = Vec::new();
    let mut last_step = f64::INFINITY;
    let mut last_err = None;
    for m in 0..budget {
        let mut red = match term(m) {
            Ok(mut r) => {
                r.inverse = polish_inverse(&r.source, r.inverse);
                r
            }
            Err(e) => {
                last_err = Some(e);
                table.clear();
                continue;
            }
        };
        let mut row = vec![red.inverse.clone()];
        for k in 1..=table.len().min(EXTRAPOLATION_DEPTH) {
            let q = ratio.powi(-(k as i32));
            let next = row[k - 1].scale(C64::new(q, 0.0)).sub(&table[k - 1]).scale(C64::new(1.0 / (q - 1.0), 0.0));
            row.push(next);
        }
        if let Some(prev_best) = table.last() {
            let best = row.last().expect("row starts with the raw term");
            let candidates = [
                (best.clone(), best.try_sub(prev_best)?.mat_norm()),
                (row[0].clone(), row[0].try_sub(&table[0])?.mat_norm()),
            ];
            last_step = candidates[0].1;
            for (estimate, step) in candidates {
                if step < tol / 4.0 && max_residual(target, &estimate) < tol {
                    red.inverse = estimate;
                    return Ok((red, m + 1));
                }
            }
        }
        table = row;
    }
    match (table.is_empty(), last_err) {
        (true, Some(e)) => Err(e),
        _ => Err(EngineError::ApproximationStalled { terms: budget, last_step }),
    }
}

pub(crate) fn default_inverter<A: BanachAlgebra>(tol: f64) -> impl Fn(&A) -> Result<A, EngineError> {
    move |a: &A| a.inverse(tol).map_err(EngineError::from)
}

pub(crate) fn default_approximant<A: BanachAlgebra>(tol: f64) -> impl Fn(&A, f64) -> Result<A, EngineError> {
    move |a: &A, eps: f64| a.perturb_to_invertible(eps, tol).map_err(EngineError::from)
}

pub(crate) fn certify<A: BanachAlgebra>(
    method: Method,
    input: &Matrix<A>,
    red: Reduction<A>,
    inverse: Matrix<A>,
    tol: f64,
    padded_to: Option<usize>,
    nest_levels: usize,
) -> Result<InversionCertificate<A>, EngineError> {
    let (residual_left, residual_right) = inverse_residuals(input, &inverse);
    let residual = residual_left.max(residual_right);
    if !(residual <= tol) {
        return Err(EngineError::ToleranceNotMet { residual, tol });
    }
    Ok(InversionCertificate {
        method,
        path: red.path,
        input: input.clone(),
        source: red.source,
        factors: red.factors,
        reduced: red.reduced,
        inverse,
        residual_left,
        residual_right,
        tolerance: tol,
        padded_to,
        nest_levels,
        limit_terms: red.limit_terms,
        lambdas: red.lambdas,
    })
}

/// Runs the named method with its default configuration.
pub fn invert_with<A: BanachAlgebra>(
    method: Method,
    t: &Matrix<A>,
    strategy: &PivotStrategy,
    tol: f64,
) -> Result<InversionCertificate<A>, EngineError> {
    match method {
        Method::Triangular => triangular_certificate(t, strategy, tol),
        Method::Prop4 => prop4_invert_2x2(t, strategy, tol),
        Method::Thm6 => thm6_invert(t, &InessentialMask::below_diagonal(t.n()), strategy, tol),
        Method::Hermitian => invert_hermitian_symmetric(t, strategy, tol),
        Method::Oracle => oracle_certificate(t, tol),
    }
}

/// Inverse of an arbitrary element of `M_n(A)`, used when matrices are
/// themselves entries of a larger matrix.
///
/// Tries recursive elimination first; when the sub-diagonal entries fail the
/// inessential proxy it falls back to the 2×2 procedure, or for symmetric
/// *-algebras to `T⁻¹ = (T*T)⁻¹T*` through the hermitian path.
pub fn general_inverse<A: BanachAlgebra>(t: &Matrix<A>, tol: f64) -> Result<Matrix<A>, EngineError> {
    let strategy = PivotStrategy { entry_tol: tol.max(PivotStrategy::default().entry_tol), ..Default::default() };
    if t.n() == 1 {
        let x = t.get(0, 0).inverse(tol)?;
        return Ok(Matrix::from_fn(1, t.inner_desc(), |_, _| x.clone()));
    }
    if t.n() == 2 {
        return prop4_invert_2x2(t, &strategy, tol).map(|c| c.inverse);
    }
    match thm6_invert(t, &InessentialMask::below_diagonal(t.n()), &strategy, tol) {
        Ok(c) => Ok(c.inverse),
        Err(EngineError::MaskViolation { .. }) if A::is_symmetric(t.inner_desc()) => {
            let star = t.star_matrix().ok_or(EngineError::NoInvolution)?;
            let gram = star.try_mul(t)?;
            let gram_inv = invert_hermitian_symmetric(&gram, &strategy, tol)?.inverse;
            Ok(gram_inv.try_mul(&star)?)
        }
        Err(e) => Err(e),
    }
}
