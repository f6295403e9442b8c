mod common;

use affcert::affine::{fixed_point, invariant_axis, unit_eigen_distance};
use affcert::linalg::{split, RealMatrix, RealVector};
use affcert::AffineMap;
use proptest::prelude::*;

fn close(a: &RealVector, b: &RealVector, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn embedding_is_a_homomorphism(n in 1usize..=6, seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let lin = common::gaussian_matrix(&mut rng, n);
        let g = common::random_affine(&mut rng, lin);
        let lin = common::gaussian_matrix(&mut rng, n);
        let h = common::random_affine(&mut rng, lin);
        let gh = g.compose(&h).unwrap();
        let diff = gh.homogeneous_embed() - g.homogeneous_embed() * h.homogeneous_embed();
        prop_assert!(diff.amax() < 1e-12 * (1.0 + gh.homogeneous_embed().amax()));
        let x = common::gaussian_vector(&mut rng, n);
        prop_assert!(close(&gh.apply(&x), &g.apply(&h.apply(&x)), 1e-12));
    }

    #[test]
    fn inverse_and_powers(n in 1usize..=6, seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let m = common::gaussian_matrix(&mut rng, n);
        prop_assume!(m.clone().try_inverse().is_some() && m.clone().lu().determinant().abs() > 1e-3);
        let g = common::random_affine(&mut rng, m);
        let id = g.compose(&g.inverse()).unwrap();
        prop_assert!(id.distance(&AffineMap::identity(n)) < 1e-8 * (1.0 + g.linear.amax()).powi(n as i32));
        let g3 = g.compose(&g).unwrap().compose(&g).unwrap();
        prop_assert!(g.power(3).distance(&g3) < 1e-9 * (1.0 + g3.linear.amax().max(g3.translation.amax())));
    }

    #[test]
    fn axis_is_invariant_and_reverses_under_inversion(k in 1usize..=3, seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let lin = common::regular_isometry(&mut rng, k);
        let g = common::random_affine(&mut rng, lin);
        let ax = invariant_axis(&g, &split(&g.linear).unwrap()).unwrap();
        prop_assert!(close(&g.apply(&ax.base_point), &(&ax.base_point + &ax.direction), 1e-8));
        let gi = g.inverse();
        let axi = invariant_axis(&gi, &split(&gi.linear).unwrap()).unwrap();
        prop_assert!(close(&axi.direction, &(-&ax.direction), 1e-8));
        // Both axes are the same line.
        prop_assert!(ax.line().distance_to_point(&axi.base_point) < 1e-7 * (1.0 + ax.base_point.norm()));
    }

    #[test]
    fn axis_translation_transforms_by_the_linear_part(k in 1usize..=3, seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let lin = common::regular_isometry(&mut rng, k);
        let g = common::random_affine(&mut rng, lin);
        let lin = common::random_isometry(&mut rng, k + 1, k, 0.5);
        let x = common::random_affine(&mut rng, lin);
        let h = g.conjugate_by(&x);
        let tg = invariant_axis(&g, &split(&g.linear).unwrap()).unwrap().direction;
        let th = invariant_axis(&h, &split(&h.linear).unwrap()).unwrap().direction;
        prop_assert!(close(&th, &(&x.linear * &tg), 1e-7));
    }

    #[test]
    fn fixed_point_is_fixed(n in 1usize..=6, seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let m = common::gaussian_matrix(&mut rng, n);
        prop_assume!(unit_eigen_distance(&m).unwrap() > 1e-2);
        let g = common::random_affine(&mut rng, m);
        let p = fixed_point(&g).unwrap();
        prop_assert!(close(&g.apply(&p), &p, 1e-9));
    }
}

#[test]
fn map_with_unit_eigenvalue_has_no_fixed_point_answer() {
    let g = AffineMap::new(
        RealMatrix::identity(2, 2),
        RealVector::from_vec(vec![1.0, 0.0]),
    )
    .unwrap();
    assert!(fixed_point(&g).is_err());
    assert!(AffineMap::new(RealMatrix::zeros(2, 2), RealVector::zeros(2)).is_err());
}
