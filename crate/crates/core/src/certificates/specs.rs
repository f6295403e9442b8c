//! Built-in example groups.

use super::GroupSpec;
use crate::affine::AffineMap;
use crate::dynamics::AmbientGroup;
use crate::error::{Error, Result};
use crate::linalg::{direct_sum, from_rows, vector, RealMatrix};
use crate::models::{boost, boost_eigen, rotation_xy};
use crate::sign::{margulis_alpha, ProductSplit, QuadraticForm};

/// Two boosts with rotated axes and translations s·v₊, so both have sign `s`.
pub fn margulis3d_example(
    boost_param: f64,
    angle: f64,
    translation_scale: f64,
) -> Result<GroupSpec> {
    if !(boost_param > 0.0) || !(translation_scale > 0.0) || !angle.is_finite() {
        return Err(Error::InvalidInput(
            "boost and translation parameters must be positive".into(),
        ));
    }
    if angle.sin().abs() < 1e-12 {
        return Err(Error::DegenerateAngle);
    }
    let form = QuadraticForm::standard(2, 1);
    let l = boost(boost_param);
    let v_plus = margulis_alpha(&AffineMap::linear(l.clone()), &form)?.neutral_vector;
    let rho = rotation_xy(angle);
    let rho_inv = rho.transpose();
    let a = AffineMap::new(l.clone(), &v_plus * translation_scale)?.named("a");
    let b = AffineMap::new(&rho * &l * &rho_inv, &rho * &v_plus * translation_scale)?.named("b");
    GroupSpec::new(vec![a, b], AmbientGroup::so_pq(2, 1), Some(form), None)
}

/// The quarter-turn in the (v₁, v₂) plane, with exact entries.
fn quarter_turn() -> RealMatrix {
    from_rows(&[&[0.0, -1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]])
}

/// g₊ = (boost with eigenvalue 2, v₂) and its quarter-turn conjugate with the
/// translation reversed, so the signs are +1 and −1. All entries are dyadic.
pub fn opposite_sign_spec() -> GroupSpec {
    let l = boost_eigen(2.0);
    let r = quarter_turn();
    let g_plus = AffineMap::new(l.clone(), vector(&[0.0, 1.0, 0.0]))
        .expect("invertible")
        .named("g");
    let g_minus = AffineMap::new(&r * &l * r.transpose(), vector(&[1.0, 0.0, 0.0]))
        .expect("invertible")
        .named("h");
    GroupSpec::new(
        vec![g_plus, g_minus],
        AmbientGroup::so_pq(2, 1),
        Some(QuadraticForm::standard(2, 1)),
        None,
    )
    .expect("valid spec")
}

/// One generator diag(2, 3, 1/6) with a translation: no eigenvalue 1.
pub fn fixed_point_spec() -> GroupSpec {
    let l = RealMatrix::from_diagonal(&vector(&[2.0, 3.0, 1.0 / 6.0]));
    let g = AffineMap::new(l, vector(&[1.0, -2.0, 0.5]))
        .expect("invertible")
        .named("a");
    GroupSpec::new(vec![g], AmbientGroup::sl(3, 1), None, None).expect("valid spec")
}

fn conj_diag(p: &RealMatrix, d: [f64; 3]) -> RealMatrix {
    p * RealMatrix::from_diagonal(&vector(&d)) * crate::linalg::inverse(p).expect("invertible")
}

/// Two elements of SO(2,1) × SL₃(ℝ) on ℝ³ ⊕ ℝ³ with the standard split; the
/// SL₃ blocks are diagonalizable with non-orthogonal eigenbases.
pub fn product_sign_spec() -> GroupSpec {
    let p = from_rows(&[&[1.0, 0.5, 0.25], &[0.0, 1.0, 0.5], &[0.5, 0.0, 1.0]]);
    let q = from_rows(&[&[1.0, 0.0, 0.5], &[0.25, 1.0, 0.0], &[0.0, 0.5, 1.0]]);
    let r = rotation_xy(1.0);
    let a = AffineMap::new(
        direct_sum(&boost(0.7), &conj_diag(&p, [3.0, 0.5, 2.0 / 3.0])),
        vector(&[0.0, 1.0, 0.0, 0.5, 0.0, 0.0]),
    )
    .expect("invertible")
    .named("a");
    let b = AffineMap::new(
        direct_sum(
            &(&r * boost(0.9) * r.transpose()),
            &conj_diag(&q, [4.0, 0.2, 1.25]),
        ),
        vector(&[0.3, 0.0, 0.0, 0.0, 0.2, 0.0]),
    )
    .expect("invertible")
    .named("b");
    GroupSpec::new(
        vec![a, b],
        AmbientGroup::product_so21_sl3(),
        None,
        Some(ProductSplit::standard()),
    )
    .expect("valid spec")
}
