mod common;

use std::f64::consts::{FRAC_PI_2, LN_2};

use affcert::dynamics::{
    power_to_hyperbolic, product_estimates, profile, transversal_pair_test, transversality,
    AmbientGroup,
};
use affcert::linalg::{vector, RealMatrix, Subspace};
use affcert::models::{boost, boost_eigen, boost_in, rotation, rotation_xy};
use affcert::{AffineMap, Error};
use common::{random_affine, random_isometry, regular_isometry, rng};

fn map(l: RealMatrix, t: [f64; 3]) -> AffineMap {
    AffineMap::new(l, vector(&t)).unwrap()
}

/// g expands along one null line, h is g turned by `theta` about the negative axis.
fn turned_pair(lambda: f64, theta: f64) -> (AffineMap, AffineMap) {
    let r = rotation_xy(theta);
    let g = map(boost_eigen(lambda), [0.0, 1.0, 0.0]);
    let h = map(&r * boost_eigen(lambda) * r.transpose(), [1.0, 0.0, 0.0]);
    (g, h)
}

fn pair_eps(g: &AffineMap, h: &AffineMap) -> f64 {
    let (pg, ph) = (profile(g).unwrap(), profile(h).unwrap());
    pg.eps_hyperbolic
        .min(ph.eps_hyperbolic)
        .min(transversality(g, h).unwrap())
}

#[test]
fn product_of_a_transversal_family_stays_hyperbolic_with_stable_drift() {
    for theta in [FRAC_PI_2, 1.0, 0.4] {
        let mut drifts = Vec::new();
        for j in 8..=20 {
            let (g, h) = turned_pair(2f64.powi(j), theta);
            let eps = pair_eps(&g, &h);
            let est = product_estimates(&g, &h, eps).unwrap();
            assert!(
                est.gh_eps >= eps / 2.0,
                "theta {theta}, j {j}: {} < {}",
                est.gh_eps,
                eps / 2.0
            );
            assert!(
                est.drift_plus.is_finite()
                    && est.drift_minus.is_finite()
                    && est.s_ratio.is_finite()
            );
            drifts.push(est.drift_plus);
        }
        let coarse = drifts[0];
        let worst = drifts.iter().cloned().fold(0.0, f64::max);
        assert!(worst <= 10.0 * coarse, "theta {theta}: {worst} vs {coarse}");
    }
}

#[test]
fn doubling_the_power_keeps_drift_within_a_factor_four() {
    let (g, h) = turned_pair(2.0, 1.0);
    let est = |n: i64| {
        let (gn, hn) = (g.power(n), h.power(n));
        product_estimates(&gn, &hn, pair_eps(&gn, &hn)).unwrap()
    };
    let (a, b) = (est(8), est(16));
    let ratio = a.drift_plus / b.drift_plus;
    assert!(
        (0.25..=4.0).contains(&ratio),
        "{} vs {}",
        a.drift_plus,
        b.drift_plus
    );
}

#[test]
fn an_element_is_not_transversal_to_itself() {
    let g = AffineMap::linear(boost(LN_2));
    assert!(matches!(
        product_estimates(&g, &g, 0.1),
        Err(Error::NotTransversal { .. })
    ));
}

#[test]
fn transversality_is_symmetric_under_inversion() {
    let mut r = rng(11);
    let mut checked = 0;
    for k in [1, 2] {
        for _ in 0..30 {
            let l = regular_isometry(&mut r, k);
            let g = random_affine(&mut r, l);
            let l = regular_isometry(&mut r, k);
            let h = random_affine(&mut r, l);
            let (Ok(a), Ok(b)) = (
                transversality(&g, &h),
                transversality(&g.inverse(), &h.inverse()),
            ) else {
                continue;
            };
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            assert!((a - transversality(&h, &g).unwrap()).abs() < 1e-12);
            checked += 1;
        }
    }
    assert!(checked >= 50, "{checked}");
}

#[test]
fn inversion_swaps_the_two_norms() {
    let mut r = rng(12);
    for k in [1, 2, 3] {
        for _ in 0..20 {
            let g = AffineMap::linear(regular_isometry(&mut r, k));
            let (p, q) = (profile(&g).unwrap(), profile(&g.inverse()).unwrap());
            assert!((p.norm_plus - q.norm_minus).abs() < 1e-9 * p.norm_plus.max(1.0));
            assert!((p.norm_minus - q.norm_plus).abs() < 1e-9 * p.norm_minus.max(1.0));
            assert!((p.s - q.s).abs() < 1e-9);
        }
    }
}

#[test]
fn powers_of_normal_elements_contract_geometrically() {
    for n in 1..=12 {
        let p = profile(&AffineMap::linear(boost(0.3).pow(n))).unwrap();
        let expected = (-0.3 * n as f64).exp();
        assert!(
            (p.s - expected).abs() < 1e-10,
            "n {n}: {} vs {expected}",
            p.s
        );
    }
    // Commuting boosts in SO(3,2) conjugated by a rotation among positive coordinates.
    let c = rotation(5, 0, 2, 0.7) * rotation(5, 1, 2, -1.1);
    let d = boost_in(5, 0, 3, 0.5) * boost_in(5, 1, 4, 1.3);
    let g = AffineMap::linear(&c * d * c.transpose());
    let s1 = profile(&g).unwrap().s;
    for n in 1..=8 {
        let sn = profile(&g.power(n)).unwrap().s;
        assert!(sn <= s1.powi(n as i32) * (1.0 + 1e-8), "n {n}");
    }
}

#[test]
fn power_to_hyperbolic_is_the_first_good_power() {
    let amb = AmbientGroup::so_pq(2, 1);
    assert_eq!(
        power_to_hyperbolic(&AffineMap::linear(boost(0.1)), &amb, 0.5).unwrap(),
        7
    );
    let mut r = rng(13);
    for k in [1, 2] {
        let amb = AmbientGroup::so_pq(k + 1, k);
        for _ in 0..10 {
            let g = AffineMap::linear(regular_isometry(&mut r, k));
            let n = power_to_hyperbolic(&g, &amb, 0.3).unwrap();
            assert!(profile(&g.power(n as i64)).unwrap().s < 0.3);
            if n > 1 {
                assert!(profile(&g.power(n as i64 - 1)).unwrap().s >= 0.3 * (1.0 - 1e-9));
            }
        }
    }
    let spin = AffineMap::linear(rotation_xy(1.0));
    assert!(power_to_hyperbolic(&spin, &amb, 0.5).is_err());
}

#[test]
fn transversal_pair_test_examples() {
    let g = AffineMap::linear(boost(1.0));
    let a_plus = Subspace::span(3, &[vector(&[1.0, 0.0, 1.0])]);
    assert!(!transversal_pair_test(&g, &AffineMap::identity(3), &a_plus).unwrap());
    assert!(
        transversal_pair_test(&g, &AffineMap::linear(rotation_xy(FRAC_PI_2)), &a_plus).unwrap()
    );
    let plane = Subspace::span(3, &[vector(&[1.0, 0.0, 0.0]), vector(&[0.0, 1.0, 0.0])]);
    assert!(matches!(
        transversal_pair_test(&g, &AffineMap::identity(3), &plane),
        Err(Error::DimMismatch { .. })
    ));
}

#[test]
fn random_translates_are_almost_always_transversal() {
    let g = AffineMap::linear(boost(1.0));
    let a_plus = Subspace::span(3, &[vector(&[1.0, 0.0, 1.0])]);
    let mut r = rng(14);
    let good = (0..100)
        .filter(|_| {
            transversal_pair_test(
                &g,
                &AffineMap::linear(random_isometry(&mut r, 2, 1, 1.0)),
                &a_plus,
            )
            .unwrap()
        })
        .count();
    assert!(good >= 95, "{good} of 100");
}
