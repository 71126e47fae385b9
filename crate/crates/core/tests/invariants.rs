//! Algebraic invariants checked on seeded random inputs.

use nbinv_core::instances::{HtDesc, ScalarDesc, ScalarMatrix, UnitizedHt, Wiener, WienerDesc};
use nbinv_core::matrix::{build_elimination_pair, nest, pad_matrix, unnest};
use nbinv_core::rng::rng_from_seed;
use nbinv_core::serial::{matrix_from_json, matrix_to_json};
use nbinv_core::verify::random::random_matrix;
use nbinv_core::{BanachAlgebra, Matrix, C64};
use proptest::prelude::*;

fn scalar(n: usize, k: usize, seed: u64) -> Matrix<ScalarMatrix> {
    random_matrix(n, &ScalarDesc { k }, &mut rng_from_seed(seed))
}

fn close<A: BanachAlgebra>(a: &Matrix<A>, b: &Matrix<A>, tol: f64) -> bool {
    a.try_sub(b).unwrap().mat_norm() <= tol * (1.0 + a.mat_norm())
}

fn submultiplicative<A: BanachAlgebra>(a: &A, b: &A) -> bool {
    a.mul(b).norm() <= a.norm() * b.norm() * (1.0 + 1e-12) + 1e-14
}

fn star_reverses_products<A: BanachAlgebra>(a: &A, b: &A) -> bool {
    let lhs = a.mul(b).star().unwrap();
    let rhs = b.star().unwrap().mul(&a.star().unwrap());
    lhs.sub(&rhs).norm() <= 1e-12 * (1.0 + a.norm() * b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sum_norm_is_submultiplicative(n in 1usize..5, k in 1usize..4, seed: u64) {
        let s = scalar(n, k, seed);
        let t = scalar(n, k, seed ^ 1);
        prop_assert!(submultiplicative(&s, &t));
        prop_assert!((s.mat_norm() - s.norm()).abs() <= 1e-12 * s.norm());
    }

    #[test]
    fn entry_norms_are_submultiplicative(seed: u64) {
        let mut rng = rng_from_seed(seed);
        let wd = WienerDesc { degree: 6 };
        let (f, g) = (Wiener::random(&wd, &mut rng), Wiener::random(&wd, &mut rng));
        prop_assert!(submultiplicative(&f, &g));
        let hd = HtDesc::uniform(12);
        let (u, v) = (UnitizedHt::random(&hd, &mut rng), UnitizedHt::random(&hd, &mut rng));
        prop_assert!(submultiplicative(&u, &v));
    }

    #[test]
    fn involutions_reverse_products(seed: u64) {
        let mut rng = rng_from_seed(seed);
        let sd = ScalarDesc { k: 3 };
        prop_assert!(star_reverses_products(&ScalarMatrix::random(&sd, &mut rng), &ScalarMatrix::random(&sd, &mut rng)));
        let wd = WienerDesc { degree: 5 };
        prop_assert!(star_reverses_products(&Wiener::random(&wd, &mut rng), &Wiener::random(&wd, &mut rng)));
        let hd = HtDesc::uniform(9);
        prop_assert!(star_reverses_products(&UnitizedHt::random(&hd, &mut rng), &UnitizedHt::random(&hd, &mut rng)));
        let s = scalar(3, 2, seed);
        let t = scalar(3, 2, seed ^ 7);
        prop_assert!(star_reverses_products(&s, &t));
    }

    #[test]
    fn padding_is_multiplicative(n in 1usize..4, extra in 0usize..3, seed: u64) {
        let s = scalar(n, 2, seed);
        let t = scalar(n, 2, seed ^ 3);
        let size = n + extra;
        let lhs = pad_matrix(&s, size).unwrap().try_mul(&pad_matrix(&t, size).unwrap()).unwrap();
        let rhs = pad_matrix(&s.try_mul(&t).unwrap(), size).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
        prop_assert_eq!(pad_matrix(&s, size).unwrap().truncate(n), s);
    }

    #[test]
    fn nesting_is_multiplicative(m in 1usize..4, seed: u64) {
        let s = scalar(2 * m, 2, seed);
        let t = scalar(2 * m, 2, seed ^ 5);
        let (ns, nt) = (nest(&s).unwrap(), nest(&t).unwrap());
        prop_assert_eq!(unnest(&ns), s.clone());
        let product = unnest(&ns.try_mul(&nt).unwrap());
        prop_assert!(close(&product, &s.try_mul(&t).unwrap(), 1e-12));
    }

    #[test]
    fn elimination_pair_clears_first_row_and_column(n in 2usize..5, k in 1usize..3, seed: u64) {
        let desc = ScalarDesc { k };
        let mut t = scalar(n, k, seed);
        t.set(0, 0, ScalarMatrix::one(&desc));
        let pair = build_elimination_pair(&t, 1e-12).unwrap();
        let reduced = pair.apply(&t).unwrap();
        for j in 1..n {
            prop_assert!(reduced.get(0, j).norm() <= 1e-12);
            prop_assert!(reduced.get(j, 0).norm() <= 1e-12);
        }
        let id = Matrix::identity(n, &desc);
        prop_assert!(close(&pair.v.try_mul(&pair.v_inv).unwrap(), &id, 1e-12));
        prop_assert!(close(&pair.w_inv.try_mul(&pair.w).unwrap(), &id, 1e-12));
        prop_assert!(pair.certificate_residual() <= 1e-12);
    }

    #[test]
    fn serialization_round_trips(n in 1usize..4, seed: u64) {
        let s = scalar(n, 2, seed);
        let json = matrix_to_json(&s);
        let back: Matrix<ScalarMatrix> = matrix_from_json(&json).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(matrix_to_json(&back), json);

        let w: Matrix<Wiener> = random_matrix(n, &WienerDesc { degree: 3 }, &mut rng_from_seed(seed));
        let json = matrix_to_json(&w);
        prop_assert_eq!(matrix_to_json(&matrix_from_json::<Wiener>(&json).unwrap()), json);

        let h: Matrix<UnitizedHt> = random_matrix(n, &HtDesc::uniform(4), &mut rng_from_seed(seed));
        let json = matrix_to_json(&h);
        prop_assert_eq!(matrix_to_json(&matrix_from_json::<UnitizedHt>(&json).unwrap()), json);
    }
}

#[test]
fn wrong_instance_is_rejected() {
    let s = scalar(2, 2, 1);
    assert!(matrix_from_json::<Wiener>(&matrix_to_json(&s)).is_err());
    assert!(matrix_from_json::<ScalarMatrix>(
        r#"{"n": 2, "instance": {"kind": "scalar_matrix", "k": 1}, "entries": [[[[1, 0]]]]}"#
    )
    .is_err());
}

#[test]
fn gelfand_estimates_on_known_spectra() {
    use nbinv_core::algebra::gelfand_radius;
    // Upper-triangular: the radius is the largest diagonal modulus, far
    // below the norm.
    let m = ScalarMatrix::from_real(2, &[0.5, 40.0, 0.0, -0.25]);
    let report = gelfand_radius(&m, 1024).unwrap();
    assert!(report.radius_a <= m.norm());
    assert!((report.radius_a - 0.5).abs() <= 0.05 * 0.5, "{}", report.radius_a);

    // Nilpotent: every power past the first vanishes.
    let z = ScalarMatrix::from_real(2, &[0.0, 3.0, 0.0, 0.0]);
    assert!(gelfand_radius(&z, 64).unwrap().radius_a <= 1e-12);

    // 2 + e^{it} has spectrum the circle of radius 1 about 2.
    let f = Wiener::constant(8, C64::new(2.0, 0.0)).add(&Wiener::monomial(8, 1, C64::new(1.0, 0.0)));
    let r = gelfand_radius(&f, 1024).unwrap().radius_a;
    assert!((r - 3.0).abs() <= 0.05 * 3.0, "{r}");
}
