//! Projective distances between lines and between projectivized subspaces.

use crate::error::{Error, Result};
use crate::linalg::{singular_values, RealVector, Subspace};

/// Sine of the angle between the lines spanned by `v` and `w`.
///
/// Evaluated as the norm of the component of ŵ orthogonal to v̂, which equals
/// ‖v∧w‖/(‖v‖‖w‖) and keeps full relative accuracy for nearly equal lines.
pub fn proj_dist(v: &RealVector, w: &RealVector) -> Result<f64> {
    let (nv, nw) = (v.norm(), w.norm());
    if nv <= 1e-12 || nw <= 1e-12 {
        return Err(Error::ZeroVector);
    }
    let (a, b) = (v / nv, w / nw);
    let r = &b - &a * a.dot(&b);
    Ok(r.norm().min(1.0))
}

/// Sines and cosines of the principal angles, ascending by angle.
fn sines_cosines(w1: &Subspace, w2: &Subspace) -> Result<Vec<(f64, f64)>> {
    if w1.is_trivial() || w2.is_trivial() {
        return Err(Error::EmptySubspace);
    }
    if w1.ambient_dim() != w2.ambient_dim() {
        return Err(Error::DimMismatch {
            expected: w1.ambient_dim(),
            found: w2.ambient_dim(),
        });
    }
    let (big, small) = if w1.dim() >= w2.dim() {
        (w1, w2)
    } else {
        (w2, w1)
    };
    let (qb, qs) = (big.basis(), small.basis());
    let cross = qb.transpose() * qs;
    let cos = singular_values(&cross);
    let perp = qs - qb * &cross;
    let mut sin = singular_values(&perp);
    sin.reverse();
    Ok((0..small.dim())
        .map(|i| {
            let (s, c) = (sin[i].min(1.0), cos[i].min(1.0));
            let r = s.hypot(c);
            (s / r, c / r)
        })
        .collect())
}

/// Principal angles in [0, π/2], ascending.
pub fn principal_angles(w1: &Subspace, w2: &Subspace) -> Result<Vec<f64>> {
    Ok(sines_cosines(w1, w2)?
        .into_iter()
        .map(|(s, c)| s.atan2(c))
        .collect())
}

/// Infimum of [`proj_dist`] over the two subspaces: sine of the smallest principal angle.
pub fn subspace_dist(w1: &Subspace, w2: &Subspace) -> Result<f64> {
    Ok(sines_cosines(w1, w2)?[0].0)
}

/// Hausdorff distance between the projectivized subspaces.
pub fn subspace_hausdorff(w1: &Subspace, w2: &Subspace) -> Result<f64> {
    let sc = sines_cosines(w1, w2)?;
    if w1.dim() != w2.dim() {
        return Ok(1.0);
    }
    Ok(sc.last().expect("nonempty").0)
}
