mod common;

use affcert::linalg::{direct_sum, from_rows, inverse, vector, RealMatrix, RealVector, Subspace};
use affcert::models::{boost, rotation_xy};
use affcert::sign::{
    extended_alpha, margulis_alpha, margulis_alpha_at, phi_side, standard_isotropic_pair,
    transported_orientations, ProductSplit, QuadraticForm,
};
use affcert::AffineMap;
use common::{gaussian_vector, random_affine, random_isometry, regular_isometry, rng};

fn scale(g: &AffineMap) -> f64 {
    1.0 + g.translation.norm()
}

#[test]
fn inversion_multiplies_alpha_by_the_parity_sign() {
    let mut r = rng(21);
    for k in 1..=3 {
        let form = QuadraticForm::standard(k + 1, k);
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        for _ in 0..50 {
            let l = regular_isometry(&mut r, k);
            let g = random_affine(&mut r, l);
            let a = margulis_alpha(&g, &form).unwrap().alpha;
            let b = margulis_alpha(&g.inverse(), &form).unwrap().alpha;
            assert!((b - sign * a).abs() < 1e-9 * scale(&g), "k {k}: {a} vs {b}");
        }
    }
}

#[test]
fn alpha_is_a_conjugation_invariant() {
    let mut r = rng(22);
    for k in 1..=3 {
        let form = QuadraticForm::standard(k + 1, k);
        for _ in 0..10 {
            let l = regular_isometry(&mut r, k);
            let g = random_affine(&mut r, l);
            let a = margulis_alpha(&g, &form).unwrap().alpha;
            for _ in 0..5 {
                let l = random_isometry(&mut r, k + 1, k, 0.5);
                let x = random_affine(&mut r, l);
                let c = g.conjugate_by(&x);
                let b = margulis_alpha(&c, &form).unwrap().alpha;
                assert!((a - b).abs() < 1e-8 * scale(&c), "k {k}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn alpha_does_not_depend_on_the_base_point() {
    let mut r = rng(23);
    for k in 1..=3 {
        let form = QuadraticForm::standard(k + 1, k);
        for _ in 0..10 {
            let l = regular_isometry(&mut r, k);
            let g = random_affine(&mut r, l);
            let a = margulis_alpha(&g, &form).unwrap().alpha;
            for _ in 0..10 {
                let x = gaussian_vector(&mut r, 2 * k + 1);
                let b = margulis_alpha_at(&g, &form, &x).unwrap().alpha;
                assert!(
                    (a - b).abs() < 1e-9 * scale(&g) * (1.0 + x.norm()),
                    "k {k}: {a} vs {b}"
                );
            }
        }
    }
}

/// +1 when the two vectors point the same way along their common line.
fn agreement(a: &RealVector, b: &RealVector) -> i32 {
    let d = a.dot(b);
    assert!(
        d.abs() > 0.5 * a.norm() * b.norm(),
        "orientations are not on one line"
    );
    if d > 0.0 {
        1
    } else {
        -1
    }
}

#[test]
fn standard_pairs_have_orientations_related_by_parity() {
    for k in 1..=3 {
        let (form, v1, v2) = standard_isotropic_pair(k);
        let (o1, o2) = transported_orientations(&form, &v1, &v2).unwrap();
        let expected = if k % 2 == 0 { 1 } else { -1 };
        assert_eq!(agreement(&o1, &o2), expected, "k {k}");
    }
}

#[test]
fn random_transversal_pairs_have_orientations_related_by_parity() {
    let mut r = rng(24);
    for k in 1..=3 {
        let (form, v1, _) = standard_isotropic_pair(k);
        let expected = if k % 2 == 0 { 1 } else { -1 };
        let mut done = 0;
        while done < 100 {
            let a = v1.image(&random_isometry(&mut r, k + 1, k, 0.8));
            let b = v1.image(&random_isometry(&mut r, k + 1, k, 0.8));
            let Ok((o1, o2)) = transported_orientations(&form, &a, &b) else {
                continue;
            };
            assert_eq!(agreement(&o1, &o2), expected, "k {k}");
            done += 1;
        }
    }
}

fn product_element(
    theta: f64,
    t: f64,
    diag: [f64; 3],
    p: &RealMatrix,
    translation: &[f64],
) -> AffineMap {
    let r = rotation_xy(theta);
    let v1 = &r * boost(t) * r.transpose();
    let v2 = p * RealMatrix::from_diagonal(&vector(&diag)) * inverse(p).unwrap();
    AffineMap::new(direct_sum(&v1, &v2), vector(translation)).unwrap()
}

#[test]
fn extended_alpha_is_additive_on_powers() {
    let p = from_rows(&[&[1.0, 0.5, 0.25], &[0.0, 1.0, 0.5], &[0.5, 0.0, 1.0]]);
    let ps = ProductSplit::standard();
    let g = product_element(
        0.8,
        0.6,
        [3.0, 0.5, 2.0 / 3.0],
        &p,
        &[0.3, -0.7, 0.4, 1.0, 0.2, -0.5],
    );
    let a = extended_alpha(&g, &ps).unwrap().alpha;
    assert!(a.abs() > 1e-3);
    for n in 1..=10 {
        let an = extended_alpha(&g.power(n), &ps).unwrap().alpha;
        assert!(
            (an - n as f64 * a).abs() < 1e-8 * n as f64,
            "n {n}: {an} vs {}",
            n as f64 * a
        );
    }
    let ai = extended_alpha(&g.inverse(), &ps).unwrap().alpha;
    assert!((ai - a).abs() < 1e-9);
}

fn null_line(v: RealVector) -> Subspace {
    Subspace::span(3, &[v])
}

#[test]
fn lines_sharing_a_plane_with_w1_lie_on_opposite_sides() {
    let form = QuadraticForm::standard(2, 1);
    let w1 = vector(&[0.0, 0.0, 1.0]);
    let mut r = rng(25);
    let mut done = 0;
    while done < 200 {
        let u = null_line(random_isometry(&mut r, 2, 1, 1.0) * vector(&[1.0, 0.0, 1.0]));
        let a = random_isometry(&mut r, 2, 1, 1.0) * vector(&[1.0, 0.0, 1.0]);
        // The second null line in span(a, w₁).
        let b = &a + &w1 * (2.0 * form.b(&a, &w1));
        let (Ok(s1), Ok(s2)) = (
            phi_side(&form, &u, &null_line(a)),
            phi_side(&form, &u, &null_line(b)),
        ) else {
            continue;
        };
        assert_eq!(s1.side * s2.side, -1);
        done += 1;
    }
}
