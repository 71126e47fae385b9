//! `M_n(A)`: square matrices over a Banach algebra with the sum norm
//! `‖T‖ = Σ_{j,k} ‖t_jk‖_A`, the GL-equivalence machinery, and the padding and
//! block-nesting embeddings used by the hermitian inversion path.

use rand::RngCore;

use crate::algebra::{BanachAlgebra, Embedded};
use crate::error::{AlgebraError, MatrixError};
use crate::{DenseMatrix, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixDesc<D> {
    pub n: usize,
    pub inner: D,
}

/// Square matrix over `A`, stored row-major. All entries share one descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<A: BanachAlgebra> {
    n: usize,
    desc: A::Desc,
    entries: Vec<A>,
}

impl<A: BanachAlgebra> Matrix<A> {
    pub fn new(n: usize, desc: A::Desc, entries: Vec<A>) -> Result<Self, MatrixError> {
        if entries.len() != n * n {
            return Err(MatrixError::EntryCount { expected: n * n, got: entries.len() });
        }
        if entries.iter().any(|e| e.descriptor() != desc) {
            return Err(MatrixError::DescriptorMismatch);
        }
        Ok(Matrix { n, desc, entries })
    }

    pub fn from_fn(n: usize, desc: &A::Desc, mut f: impl FnMut(usize, usize) -> A) -> Self {
        let entries = (0..n * n).map(|idx| f(idx / n, idx % n)).collect();
        Matrix { n, desc: desc.clone(), entries }
    }

    /// Builds from rows; the descriptor is taken from the first entry.
    pub fn from_rows(rows: Vec<Vec<A>>) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n == 0 {
            return Err(MatrixError::EntryCount { expected: 1, got: 0 });
        }
        let desc = rows[0][0].descriptor();
        let entries: Vec<A> = rows
            .into_iter()
            .map(|r| if r.len() == n { Ok(r) } else { Err(MatrixError::DimensionMismatch(n, r.len())) })
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .flatten()
            .collect();
        Self::new(n, desc, entries)
    }

    pub fn identity(n: usize, desc: &A::Desc) -> Self {
        Self::from_fn(n, desc, |i, j| if i == j { A::one(desc) } else { A::zero(desc) })
    }

    pub fn zeros(n: usize, desc: &A::Desc) -> Self {
        Self::from_fn(n, desc, |_, _| A::zero(desc))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn inner_desc(&self) -> &A::Desc {
        &self.desc
    }

    pub fn get(&self, i: usize, j: usize) -> &A {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: A) {
        debug_assert_eq!(value.descriptor(), self.desc);
        self.entries[i * self.n + j] = value;
    }

    pub fn entries(&self) -> &[A] {
        &self.entries
    }

    pub fn map(&self, f: impl Fn(&A) -> A) -> Self {
        Matrix { n: self.n, desc: self.desc.clone(), entries: self.entries.iter().map(f).collect() }
    }

    fn zip(&self, rhs: &Self, f: impl Fn(&A, &A) -> A) -> Self {
        Matrix {
            n: self.n,
            desc: self.desc.clone(),
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| f(a, b)).collect(),
        }
    }

    fn check_compatible(&self, rhs: &Self) -> Result<(), MatrixError> {
        if self.n != rhs.n {
            return Err(MatrixError::DimensionMismatch(self.n, rhs.n));
        }
        if self.desc != rhs.desc {
            return Err(MatrixError::DescriptorMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self, MatrixError> {
        self.check_compatible(rhs)?;
        Ok(self.zip(rhs, A::add))
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self, MatrixError> {
        self.check_compatible(rhs)?;
        Ok(self.zip(rhs, A::sub))
    }

    /// `(TS)_jk = Σ_l t_jl·s_lk`, factors kept in order.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self, MatrixError> {
        self.check_compatible(rhs)?;
        let n = self.n;
        Ok(Self::from_fn(n, &self.desc, |j, k| {
            let mut acc = self.get(j, 0).mul(rhs.get(0, k));
            for l in 1..n {
                acc = acc.add(&self.get(j, l).mul(rhs.get(l, k)));
            }
            acc
        }))
    }

    pub fn mat_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).sum()
    }

    /// `(T*)_jk = (t_kj)*`.
    pub fn star_matrix(&self) -> Option<Self> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.n {
            for k in 0..self.n {
                entries.push(self.get(k, j).star()?);
            }
        }
        Some(Matrix { n: self.n, desc: self.desc.clone(), entries })
    }

    /// `‖T − T*‖`, or `None` without an involution.
    pub fn hermitian_defect(&self) -> Option<f64> {
        Some(self.zip(&self.star_matrix()?, A::sub).mat_norm())
    }

    pub fn swap_rows(&self, a: usize, b: usize) -> Self {
        let mut out = self.clone();
        for k in 0..self.n {
            out.entries.swap(a * self.n + k, b * self.n + k);
        }
        out
    }

    pub fn swap_cols(&self, a: usize, b: usize) -> Self {
        let mut out = self.clone();
        for j in 0..self.n {
            out.entries.swap(j * self.n + a, j * self.n + b);
        }
        out
    }

    /// Deletes the first row and the first column.
    pub fn trailing_minor(&self) -> Self {
        let m = self.n - 1;
        Self::from_fn(m, &self.desc, |j, k| self.get(j + 1, k + 1).clone())
    }

    /// `diag(1, T)`.
    pub fn bordered(&self) -> Self {
        let desc = &self.desc;
        Self::from_fn(self.n + 1, desc, |j, k| match (j, k) {
            (0, 0) => A::one(desc),
            (0, _) | (_, 0) => A::zero(desc),
            _ => self.get(j - 1, k - 1).clone(),
        })
    }

    /// Top-left `m×m` block.
    pub fn truncate(&self, m: usize) -> Self {
        assert!(m <= self.n);
        Self::from_fn(m, &self.desc, |j, k| self.get(j, k).clone())
    }

    /// Reverses the order of rows and columns: `J·T·J` with `J` the reversal
    /// permutation. Maps lower-triangular patterns to upper-triangular ones.
    pub fn reversed(&self) -> Self {
        let n = self.n;
        Self::from_fn(n, &self.desc, |j, k| self.get(n - 1 - j, n - 1 - k).clone())
    }

    /// Largest norm among entries strictly below the diagonal.
    pub fn below_diagonal_norm(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.n {
            for k in 0..j {
                worst = worst.max(self.get(j, k).norm());
            }
        }
        worst
    }
}

/// `Σ_j Σ_k ‖t_jk‖_A`.
pub fn mat_norm<A: BanachAlgebra>(t: &Matrix<A>) -> f64 {
    t.mat_norm()
}

pub fn mat_mul<A: BanachAlgebra>(t: &Matrix<A>, s: &Matrix<A>) -> Result<Matrix<A>, MatrixError> {
    t.try_mul(s)
}

/// Residual `max(‖T·X − I‖, ‖X·T − I‖)` in the sum norm.
pub fn inverse_residuals<A: BanachAlgebra>(t: &Matrix<A>, x: &Matrix<A>) -> (f64, f64) {
    let id = Matrix::identity(t.n, &t.desc);
    let left = x.zip_mul(t).zip(&id, A::sub).mat_norm();
    let right = t.zip_mul(x).zip(&id, A::sub).mat_norm();
    (left, right)
}

impl<A: BanachAlgebra> Matrix<A> {
    fn zip_mul(&self, rhs: &Self) -> Self {
        self.try_mul(rhs).expect("incompatible matrices")
    }
}

/// A pair `V, W ∈ GL_n(A)` together with certified inverses; it carries `T`
/// to `V·T·W`.
#[derive(Debug, Clone)]
pub struct GlPair<A: BanachAlgebra> {
    pub label: String,
    pub v: Matrix<A>,
    pub w: Matrix<A>,
    pub v_inv: Matrix<A>,
    pub w_inv: Matrix<A>,
}

impl<A: BanachAlgebra> GlPair<A> {
    pub fn identity(n: usize, desc: &A::Desc) -> Self {
        let id = Matrix::identity(n, desc);
        GlPair { label: "identity".into(), v: id.clone(), w: id.clone(), v_inv: id.clone(), w_inv: id }
    }

    /// Left multiplication only.
    pub fn left(label: impl Into<String>, v: Matrix<A>, v_inv: Matrix<A>) -> Self {
        let id = Matrix::identity(v.n, &v.desc);
        GlPair { label: label.into(), v, v_inv, w: id.clone(), w_inv: id }
    }

    /// Interchange of rows `a` and `b`, a self-inverse left factor.
    pub fn row_swap(n: usize, desc: &A::Desc, a: usize, b: usize) -> Self {
        let p = Matrix::identity(n, desc).swap_rows(a, b);
        Self::left(format!("swap_rows({},{})", a + 1, b + 1), p.clone(), p)
    }

    /// Interchange of columns `a` and `b`, a self-inverse right factor.
    pub fn col_swap(n: usize, desc: &A::Desc, a: usize, b: usize) -> Self {
        let p = Matrix::identity(n, desc).swap_cols(a, b);
        let id = Matrix::identity(n, desc);
        GlPair { label: format!("swap_cols({},{})", a + 1, b + 1), v: id.clone(), v_inv: id, w: p.clone(), w_inv: p }
    }

    pub fn n(&self) -> usize {
        self.v.n
    }

    /// `V·T·W`.
    pub fn apply(&self, t: &Matrix<A>) -> Result<Matrix<A>, MatrixError> {
        self.v.try_mul(t)?.try_mul(&self.w)
    }

    /// Largest of the four residuals `V·V⁻¹ − I`, `V⁻¹·V − I`, and likewise for `W`.
    pub fn certificate_residual(&self) -> f64 {
        let (a, b) = inverse_residuals(&self.v, &self.v_inv);
        let (c, d) = inverse_residuals(&self.w, &self.w_inv);
        a.max(b).max(c).max(d)
    }

    /// `diag(1, V), diag(1, W)`: the pair acting on the trailing block.
    pub fn bordered(&self) -> Self {
        GlPair {
            label: self.label.clone(),
            v: self.v.bordered(),
            w: self.w.bordered(),
            v_inv: self.v_inv.bordered(),
            w_inv: self.w_inv.bordered(),
        }
    }

    /// Conjugation by the reversal permutation on all four factors.
    pub fn reversed(&self) -> Self {
        GlPair {
            label: self.label.clone(),
            v: self.v.reversed(),
            w: self.w.reversed(),
            v_inv: self.v_inv.reversed(),
            w_inv: self.w_inv.reversed(),
        }
    }
}

impl<A: BanachAlgebra> GlPair<Matrix<A>> {
    pub fn unnest(&self) -> GlPair<A> {
        GlPair {
            label: self.label.clone(),
            v: unnest(&self.v),
            w: unnest(&self.w),
            v_inv: unnest(&self.v_inv),
            w_inv: unnest(&self.w_inv),
        }
    }
}

/// Whether `‖V·T·W − S‖ ≤ tol`.
pub fn check_gl_equivalence<A: BanachAlgebra>(t: &Matrix<A>, s: &Matrix<A>, pair: &GlPair<A>, tol: f64) -> bool {
    match pair.apply(t).and_then(|vtw| vtw.try_sub(s)) {
        Ok(diff) => diff.mat_norm() <= tol,
        Err(_) => false,
    }
}

/// Elimination pair for a matrix whose `(1,1)` entry is the unit.
///
/// `V` has unit diagonal and `−t_j1` below it in the first column; `W` has unit
/// diagonal and `−t_1k` to its right in the first row. `V·T·W` then has the
/// unit in the corner and zeros elsewhere in the first row and column.
pub fn build_elimination_pair<A: BanachAlgebra>(t: &Matrix<A>, tol: f64) -> Result<GlPair<A>, MatrixError> {
    let desc = &t.desc;
    let defect = t.get(0, 0).sub(&A::one(desc)).norm();
    if defect > tol {
        return Err(MatrixError::PivotNotUnit(defect));
    }
    let n = t.n;
    let column = |sign: f64| {
        Matrix::from_fn(n, desc, |j, k| match (j, k) {
            _ if j == k => A::one(desc),
            (_, 0) => t.get(j, 0).scale(C64::new(sign, 0.0)),
            _ => A::zero(desc),
        })
    };
    let row = |sign: f64| {
        Matrix::from_fn(n, desc, |j, k| match (j, k) {
            _ if j == k => A::one(desc),
            (0, _) => t.get(0, k).scale(C64::new(sign, 0.0)),
            _ => A::zero(desc),
        })
    };
    Ok(GlPair { label: "eliminate".into(), v: column(-1.0), v_inv: column(1.0), w: row(-1.0), w_inv: row(1.0) })
}

/// `T̃ = T ⊕ I_{N−m}`: `T` in the top-left block, unit diagonal beyond it.
pub fn pad_matrix<A: BanachAlgebra>(t: &Matrix<A>, target: usize) -> Result<Matrix<A>, MatrixError> {
    if target < t.n {
        return Err(MatrixError::BadDimension { source_dim: t.n, target });
    }
    let desc = &t.desc;
    Ok(Matrix::from_fn(target, desc, |j, k| {
        if j < t.n && k < t.n {
            t.get(j, k).clone()
        } else if j == k {
            A::one(desc)
        } else {
            A::zero(desc)
        }
    }))
}

/// Regards a `2m×2m` matrix over `A` as a `2×2` matrix over `M_m(A)`.
pub fn nest<A: BanachAlgebra>(t: &Matrix<A>) -> Result<Matrix<Matrix<A>>, MatrixError> {
    if !t.n.is_multiple_of(2) {
        return Err(MatrixError::OddDimension(t.n));
    }
    let m = t.n / 2;
    let inner = MatrixDesc { n: m, inner: t.desc.clone() };
    Ok(Matrix::from_fn(2, &inner, |bj, bk| Matrix::from_fn(m, &t.desc, |j, k| t.get(bj * m + j, bk * m + k).clone())))
}

/// Flattens an `n×n` matrix over `M_m(A)` into an `nm×nm` matrix over `A`.
pub fn unnest<A: BanachAlgebra>(t: &Matrix<Matrix<A>>) -> Matrix<A> {
    let m = t.desc.n;
    let n = t.n;
    Matrix::from_fn(n * m, &t.desc.inner, |j, k| t.get(j / m, k / m).get(j % m, k % m).clone())
}

/// One large dense matrix made of the dense blocks of every entry.
pub fn flatten<A: BanachAlgebra>(t: &Matrix<A>) -> Option<DenseMatrix> {
    let b = A::dense_dim(&t.desc)?;
    let mut out = DenseMatrix::zeros(t.n * b, t.n * b);
    for j in 0..t.n {
        for k in 0..t.n {
            let block = t.get(j, k).to_dense()?;
            out.view_mut((j * b, k * b), (b, b)).copy_from(&block);
        }
    }
    Some(out)
}

pub fn unflatten<A: BanachAlgebra>(n: usize, desc: &A::Desc, dense: &DenseMatrix) -> Result<Matrix<A>, AlgebraError> {
    let b = A::dense_dim(desc).ok_or(AlgebraError::NotSupported("dense representation"))?;
    if dense.nrows() != n * b || dense.ncols() != n * b {
        return Err(AlgebraError::DescriptorMismatch);
    }
    let mut entries = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            let block = dense.view((j * b, k * b), (b, b)).clone_owned();
            entries.push(A::from_dense(desc, &block)?);
        }
    }
    Ok(Matrix { n, desc: desc.clone(), entries })
}

impl<A: BanachAlgebra> BanachAlgebra for Matrix<A> {
    type Desc = MatrixDesc<A::Desc>;

    fn descriptor(&self) -> Self::Desc {
        MatrixDesc { n: self.n, inner: self.desc.clone() }
    }

    fn zero(desc: &Self::Desc) -> Self {
        Matrix::zeros(desc.n, &desc.inner)
    }

    fn one(desc: &Self::Desc) -> Self {
        Matrix::identity(desc.n, &desc.inner)
    }

    fn add(&self, rhs: &Self) -> Self {
        self.try_add(rhs).expect("incompatible matrices")
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.try_sub(rhs).expect("incompatible matrices")
    }

    fn mul(&self, rhs: &Self) -> Self {
        self.zip_mul(rhs)
    }

    fn scale(&self, s: C64) -> Self {
        self.map(|e| e.scale(s))
    }

    fn norm(&self) -> f64 {
        self.mat_norm()
    }

    fn star(&self) -> Option<Self> {
        self.star_matrix()
    }

    fn involution_bound(desc: &Self::Desc) -> Option<f64> {
        A::involution_bound(&desc.inner)
    }

    fn is_symmetric(desc: &Self::Desc) -> bool {
        A::is_symmetric(&desc.inner)
    }

    fn star_is_adjoint(desc: &Self::Desc) -> bool {
        A::star_is_adjoint(&desc.inner)
    }

    fn inverse(&self, tol: f64) -> Result<Self, AlgebraError> {
        crate::engine::general_inverse(self, tol).map_err(|e| AlgebraError::NotInvertible(e.to_string()))
    }

    fn spectrum(&self) -> Option<Vec<C64>> {
        let d = flatten(self)?;
        if d.nrows() > 64 {
            return None;
        }
        d.eigenvalues().map(|v| v.iter().copied().collect())
    }

    /// `I(M_n(A)) = M_n(I(A))`.
    fn is_inessential(&self) -> bool {
        self.entries.iter().all(A::is_inessential)
    }

    fn default_tolerance(desc: &Self::Desc) -> f64 {
        A::default_tolerance(&desc.inner)
    }

    fn dense_dim(desc: &Self::Desc) -> Option<usize> {
        A::dense_dim(&desc.inner).map(|b| b * desc.n)
    }

    fn to_dense(&self) -> Option<DenseMatrix> {
        flatten(self)
    }

    fn from_dense(desc: &Self::Desc, block: &DenseMatrix) -> Result<Self, AlgebraError> {
        unflatten(desc.n, &desc.inner, block)
    }

    fn random(desc: &Self::Desc, rng: &mut dyn RngCore) -> Self {
        Matrix::from_fn(desc.n, &desc.inner, |_, _| A::random(&desc.inner, rng))
    }
}

impl<A: Embedded> Embedded for Matrix<A> {
    type Ambient = Matrix<A::Ambient>;

    fn embed(&self) -> Matrix<A::Ambient> {
        let desc = A::ambient_descriptor(&self.desc);
        Matrix { n: self.n, desc, entries: self.entries.iter().map(A::embed).collect() }
    }

    fn ambient_descriptor(desc: &Self::Desc) -> MatrixDesc<<A::Ambient as BanachAlgebra>::Desc> {
        MatrixDesc { n: desc.n, inner: A::ambient_descriptor(&desc.inner) }
    }

    fn embedding_constant(desc: &Self::Desc) -> f64 {
        A::embedding_constant(&desc.inner)
    }
}
