//! Constructive inversion of matrices whose entries live in a unital Banach
//! algebra.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: the [`BanachAlgebra`] contract plus element-level procedures
//!   (Neumann inversion, Gelfand spectral radius, approximation by invertibles,
//!   symmetry witnesses).
//! * [`instances`]: concrete algebras (scalar matrices, a cyclic Wiener
//!   algebra and its grid-function ambient, unitized Hille–Tamarkin kernel
//!   operators, and a non-symmetric control).
//! * [`matrix`]: `M_n(A)` with the sum norm, GL-equivalence pairs, padding and
//!   block nesting.
//! * [`engine`]: triangular back substitution, the 2×2 pivot-interchange
//!   procedure, recursive elimination for matrices with inessential
//!   sub-diagonal entries, the hermitian pad-and-nest path, and a dense oracle.
//! * [`verify`]: randomized experiments and the suite runner driving the CLI.

// `!(x <= tol)` is used on purpose: a NaN residual must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod engine;
pub mod error;
pub mod instances;
pub mod matrix;
pub mod rng;
pub mod serial;
pub mod verify;

pub use algebra::{BanachAlgebra, Embedded, SpectralReport};
pub use engine::{InversionCertificate, Method, PathTag, PivotStrategy};
pub use error::{AlgebraError, EngineError, MatrixError, SerialError};
pub use matrix::{GlPair, Matrix, MatrixDesc};

/// Complex scalars used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix used for flattened representations.
pub type DenseMatrix = nalgebra::DMatrix<C64>;
