//! Fixed inputs for the engine benchmarks, built from a seed so every run
//! times the same matrices.

use nbinv_core::instances::{ScalarDesc, ScalarMatrix, Wiener, WienerDesc};
use nbinv_core::rng::rng_from_seed;
use nbinv_core::verify::random::{random_hermitian_invertible, random_invertible, random_singular_corner};
use nbinv_core::{BanachAlgebra, Matrix, C64};

pub const SEED: u64 = 0xbe_4c4;

pub fn scalar_invertible(n: usize, k: usize) -> Matrix<ScalarMatrix> {
    random_invertible(n, &ScalarDesc { k }, &mut rng_from_seed(SEED ^ (n * 16 + k) as u64))
}

pub fn singular_corner(k: usize) -> Matrix<ScalarMatrix> {
    random_singular_corner(k, false, &mut rng_from_seed(SEED ^ 0x51))
}

/// A singular-corner matrix whose every entry is singular, which forces the
/// perturbed-limit path.
pub fn all_singular(k: usize) -> Matrix<ScalarMatrix> {
    let mut rng = rng_from_seed(SEED ^ 0x52);
    loop {
        let t = random_singular_corner(k, true, &mut rng);
        if t.entries().iter().all(|e| e.inverse(1e-8).is_err()) {
            return t;
        }
    }
}

pub fn hermitian(n: usize, k: usize) -> Matrix<ScalarMatrix> {
    random_hermitian_invertible(n, &ScalarDesc { k }, &mut rng_from_seed(SEED ^ 0x4e))
        .expect("scalar matrices carry an involution")
}

/// `a + e^{it}` at the given degree.
pub fn wiener_shift(degree: usize, a: f64) -> Wiener {
    Wiener::constant(degree, C64::new(a, 0.0)).add(&Wiener::monomial(degree, 1, C64::new(1.0, 0.0)))
}

pub fn wiener_matrix(n: usize, degree: usize) -> Matrix<Wiener> {
    random_invertible(n, &WienerDesc { degree }, &mut rng_from_seed(SEED ^ 0x57))
}
