//! Property tests for the algebraic invariants.

use iqmimo::augment::{augment, permutation_matrix};
use iqmimo::iqi::{build_bs_iqi, build_ut_iqi};
use iqmimo::linalg::{rel_frobenius, trace_prod};
use iqmimo::training::gen_training;
use iqmimo::{C64, CMat, RMat};
use proptest::prelude::*;

fn cmat(rows: usize, cols: usize) -> impl Strategy<Value = CMat> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols).prop_map(move |entries| {
        CMat::from_fn(rows, cols, |i, j| {
            let (re, im) = entries[i * cols + j];
            C64::new(re, im)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn augmentation_is_a_ring_homomorphism(a in cmat(4, 3), b in cmat(3, 5)) {
        let prod = augment(&(&a * &b));
        let split = augment(&a) * augment(&b);
        prop_assert!(rel_frobenius(&prod, &split) < 1e-12);
        prop_assert!(rel_frobenius(&augment(&a.adjoint()), &augment(&a).transpose()) < 1e-12);
    }

    #[test]
    fn mixing_energy_law_holds(eps in 0.0f64..1.0, theta in -1.5f64..1.5) {
        let ut = build_ut_iqi(eps, theta).unwrap();
        let expect = 2.0 * (1.0 + eps * eps);
        prop_assert!((ut.mixing_energy() - expect).abs() < 1e-12 * expect.max(1.0));
        // The two column energies split the total.
        let (a, b) = ut.column_energies();
        prop_assert!((a + b - expect).abs() < 1e-12 * expect.max(1.0));
    }

    #[test]
    fn bs_mixing_trace_law_holds(
        eps in proptest::collection::vec(0.0f64..0.5, 1..12),
        theta_seed in 0u64..1000,
    ) {
        let theta: Vec<f64> =
            eps.iter().enumerate().map(|(i, _)| ((theta_seed + i as u64) % 7) as f64 * 0.01).collect();
        let bs = build_bs_iqi(&eps, &theta).unwrap();
        let expect = 2.0 * eps.len() as f64 + 2.0 * eps.iter().map(|e| e * e).sum::<f64>();
        prop_assert!((bs.aug.norm_squared() - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn permutation_is_orthogonal(n in 1usize..16) {
        let p = permutation_matrix(n);
        let gram = &p * p.transpose();
        prop_assert!(rel_frobenius(&gram, &RMat::identity(2 * n, 2 * n)) < 1e-15);
    }

    #[test]
    fn training_columns_stay_orthonormal(k in 1usize..12, extra in 0usize..8) {
        let t = k + extra;
        let ts = gen_training(k, t).unwrap();
        let gram = ts.x.transpose() * &ts.x;
        prop_assert!((gram - RMat::identity(k, k)).norm() < 1e-12);
    }

    #[test]
    fn trace_prod_matches_dense_trace(a in cmat(4, 4), b in cmat(4, 4)) {
        let direct = (&a * &b).trace();
        let fast = trace_prod(&a, &b);
        prop_assert!((direct - fast).norm() < 1e-12);
    }
}
