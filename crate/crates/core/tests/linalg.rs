mod common;

use affcert::linalg::{
    char_poly, determinant, direct_sum, eigenvalues, from_rows, kernel, min_singular_value,
    poly_eval_matrix, split, svd, RealMatrix, Subspace,
};
use affcert::metric::subspace_hausdorff;
use affcert::models::boost;
use affcert::Error;
use proptest::prelude::*;

/// Faddeev–LeVerrier: an independent route to the characteristic polynomial.
fn leverrier(m: &RealMatrix) -> Vec<f64> {
    let n = m.nrows();
    let id = RealMatrix::identity(n, n);
    let mut c = vec![1.0];
    let mut mk = RealMatrix::zeros(n, n);
    for k in 1..=n {
        mk = m * &mk + &id * c[k - 1];
        let ck = -(m * &mk).trace() / k as f64;
        c.push(ck);
    }
    c
}

fn stacked(parts: &[&Subspace]) -> RealMatrix {
    let n = parts[0].ambient_dim();
    let cols: Vec<_> = parts.iter().flat_map(|s| s.vectors()).collect();
    if cols.is_empty() {
        return RealMatrix::identity(n, n);
    }
    RealMatrix::from_columns(&cols)
}

#[test]
fn boost_char_poly_matches_leverrier() {
    let b = boost(std::f64::consts::LN_2);
    let ours = char_poly(&b);
    for (a, e) in ours.iter().zip([1.0, -3.5, 3.5, -1.0]) {
        assert!((a - e).abs() < 1e-13);
    }
    for (a, e) in ours.iter().zip(leverrier(&b)) {
        assert!((a - e).abs() < 1e-13);
    }
}

#[test]
fn jordan_block_keeps_its_kernel() {
    let j = from_rows(&[&[2.0, 1.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 0.25]]);
    let s = split(&j).unwrap();
    assert_eq!(s.dims(), (2, 1, 0));
    let lhs = j - RealMatrix::identity(3, 3) * 2.0;
    assert_eq!(kernel(&(&lhs * &lhs), 1e-8).dim(), 2);
}

#[test]
fn rotation_block_is_neutral_as_a_pair() {
    let r = from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
    let d = from_rows(&[&[3.0, 0.0], &[0.0, 0.5]]);
    let s = split(&direct_sum(&r, &d)).unwrap();
    assert_eq!(s.dims(), (1, 1, 2));
}

#[test]
fn svd_of_a_symmetric_rank_two_matrix() {
    // A case where the bidiagonal SVD in nalgebra loses accuracy.
    let l = RealMatrix::from_column_slice(
        3,
        3,
        &[
            1.0051893108469574,
            0.02066930278178855,
            0.1040805972238162,
            0.02066930278178855,
            1.0823269389876202,
            0.4145585880618049,
            0.10408059722381618,
            0.41455858806180484,
            1.0875162498345776,
        ],
    );
    let m = l - RealMatrix::identity(3, 3);
    let s = svd(&m);
    let rec = s.u.as_ref().unwrap()
        * RealMatrix::from_diagonal(&s.singular_values)
        * s.v_t.as_ref().unwrap();
    assert!((rec - &m).amax() < 1e-15);
    let gram = (m.transpose() * &m).symmetric_eigenvalues();
    let mut expect: Vec<f64> = gram.iter().map(|x| x.max(0.0).sqrt()).collect();
    expect.sort_by(|a, b| b.total_cmp(a));
    for (a, b) in s.singular_values.iter().zip(&expect[..2]) {
        assert!((a - b).abs() < 1e-14);
    }
    assert!(s.singular_values[2] < 1e-15);
}

fn random_case() -> impl Strategy<Value = (usize, u64)> {
    (2usize..=7, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn split_is_a_direct_sum_of_invariant_parts((n, seed) in random_case()) {
        let mut rng = common::rng(seed);
        let m = common::gaussian_matrix(&mut rng, n);
        let s = match split(&m) {
            Ok(s) => s,
            Err(Error::AmbiguousModulus { .. } | Error::SingularMatrix(_)) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        let (p, q, z) = s.dims();
        prop_assert_eq!(p + q + z, n);
        prop_assert!(min_singular_value(&stacked(&[&s.a_plus, &s.a_minus, &s.a_zero])) > 1e-10);
        for part in [&s.a_plus, &s.a_minus, &s.a_zero] {
            prop_assert!(part.invariance_residual(&m) < 1e-8 * m.norm().max(1.0));
        }
    }

    #[test]
    fn inverse_swaps_expanding_and_contracting((n, seed) in random_case()) {
        let mut rng = common::rng(seed);
        let m = common::gaussian_matrix(&mut rng, n);
        // Far from singular, so that the inverse is accurate.
        let sv = svd(&m).singular_values;
        prop_assume!(sv[0] < 100.0 * sv[n - 1]);
        let (Ok(s), Some(inv)) = (split(&m), m.clone().try_inverse()) else { return Ok(()) };
        let Ok(t) = split(&inv) else { return Ok(()) };
        prop_assert_eq!(s.a_plus.dim(), t.a_minus.dim());
        prop_assert_eq!(s.a_minus.dim(), t.a_plus.dim());
        if !s.a_plus.is_trivial() {
            prop_assert!(subspace_hausdorff(&s.a_plus, &t.a_minus).unwrap() < 1e-6);
        }
        if !s.a_minus.is_trivial() {
            prop_assert!(subspace_hausdorff(&s.a_minus, &t.a_plus).unwrap() < 1e-6);
        }
    }

    #[test]
    fn conjugation_moves_the_split((n, seed) in random_case()) {
        let mut rng = common::rng(seed);
        let m = common::gaussian_matrix(&mut rng, n);
        let q = common::gaussian_matrix(&mut rng, n).qr().q();
        let Ok(s) = split(&m) else { return Ok(()) };
        let Ok(t) = split(&(&q * &m * q.transpose())) else { return Ok(()) };
        for (a, b) in [(&s.a_plus, &t.a_plus), (&s.a_minus, &t.a_minus), (&s.a_zero, &t.a_zero)] {
            prop_assert_eq!(a.dim(), b.dim());
            if !a.is_trivial() {
                prop_assert!(subspace_hausdorff(&a.image(&q), b).unwrap() < 1e-6);
            }
        }
    }

    #[test]
    fn char_poly_agrees_with_oracle_and_annihilates((n, seed) in random_case()) {
        let mut rng = common::rng(seed);
        let m = common::gaussian_matrix(&mut rng, n);
        let c = char_poly(&m);
        let scale = m.norm().max(1.0).powi(n as i32);
        for (k, (a, e)) in c.iter().zip(leverrier(&m)).enumerate() {
            prop_assert!((a - e).abs() < 1e-9 * m.norm().max(1.0).powi(k as i32), "coefficient {}", k);
        }
        prop_assert!(poly_eval_matrix(&c, &m).amax() < 1e-8 * scale);
    }

    #[test]
    fn svd_reconstructs_any_shape(r in 1usize..=8, c in 1usize..=8, rank in 0usize..=8, seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let k = rank.min(r).min(c);
        let a = RealMatrix::from_fn(r, k, |_, _| rand_distr::Distribution::<f64>::sample(&rand_distr::StandardNormal, &mut rng));
        let b = RealMatrix::from_fn(k, c, |_, _| rand_distr::Distribution::<f64>::sample(&rand_distr::StandardNormal, &mut rng));
        let m = a * b;
        let s = svd(&m);
        let (u, vt) = (s.u.unwrap(), s.v_t.unwrap());
        let rec = &u * RealMatrix::from_diagonal(&s.singular_values) * &vt;
        prop_assert!((rec - &m).amax() < 1e-13 * (1.0 + m.amax()));
        let p = r.min(c);
        prop_assert!((u.transpose() * &u - RealMatrix::identity(p, p)).amax() < 1e-13);
        prop_assert!((&vt * vt.transpose() - RealMatrix::identity(p, p)).amax() < 1e-13);
        prop_assert!(s.singular_values.as_slice().windows(2).all(|w| w[0] >= w[1]));
        let tiny = s.singular_values.iter().filter(|&&x| x < 1e-12 * (1.0 + m.amax())).count();
        prop_assert_eq!(tiny, p - k);
    }

    #[test]
    fn eigenvalues_match_trace_and_determinant((n, seed) in random_case()) {
        let mut rng = common::rng(seed);
        let m = common::gaussian_matrix(&mut rng, n);
        let eig = eigenvalues(&m).unwrap();
        prop_assert_eq!(eig.len(), n);
        let sum: f64 = eig.iter().map(|z| z.re).sum();
        let prod = eig.iter().fold(nalgebra::Complex::new(1.0, 0.0), |acc, z| acc * z);
        prop_assert!((sum - m.trace()).abs() < 1e-10 * (1.0 + m.norm()));
        prop_assert!((prod.re - determinant(&m)).abs() < 1e-9 * (1.0 + m.norm()).powi(n as i32));
        for z in &eig {
            let shifted = nalgebra::DMatrix::from_fn(n, n, |i, j| {
                nalgebra::Complex::new(m[(i, j)], 0.0) - if i == j { *z } else { nalgebra::Complex::new(0.0, 0.0) }
            });
            let smin = shifted.singular_values().iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assert!(smin < 1e-8 * (1.0 + m.norm()));
        }
    }
}
