//! Re-verification of certificates from their own payload.

use super::exact::{self, exact_power, Dyadic, ExactMap};
use super::scan::{proper_scan, ScanCert};
use super::screen::FixedPointCert;
use super::search::OppositeSignCert;
use super::witness::WitnessCert;
use super::{Certificate, GroupSpec};
use crate::affine::unit_eigen_distance;
use crate::dynamics::{profile, transversality_profiles, AmbientGroup};
use crate::linalg::RealVector;

type Check = std::result::Result<(), String>;

const FIXED_POINT_TOL: f64 = 1e-8;
const ALPHA_TOL: f64 = 1e-7;

pub(super) fn fixed_point(c: &FixedPointCert) -> Check {
    let g = &c.map;
    if c.fixed_point.len() != g.dim() {
        return Err("fixed point has the wrong dimension".into());
    }
    let p = RealVector::from_column_slice(&c.fixed_point);
    let residual = (g.apply(&p) - &p).norm();
    let scale = 1.0f64.max(p.norm());
    if !(residual < FIXED_POINT_TOL * scale) {
        return Err(format!("fixed point residual {residual:e}"));
    }
    let d = unit_eigen_distance(&g.linear).map_err(|e| e.to_string())?;
    if !(d > 0.0)
        || c.eigen_distances
            .first()
            .is_none_or(|&s| (s - d).abs() > 1e-8 * (1.0 + d))
    {
        return Err(format!(
            "eigenvalue distance {d:e} does not match the record"
        ));
    }
    Ok(())
}

pub(super) fn opposite_sign(c: &OppositeSignCert) -> Check {
    let [g, h] = &c.maps;
    let a = [
        c.setting.alpha(g).map_err(|e| e.to_string())?,
        c.setting.alpha(h).map_err(|e| e.to_string())?,
    ];
    for (k, (x, y)) in a.iter().zip(&c.alphas).enumerate() {
        if (x - y).abs() > ALPHA_TOL * (1.0 + y.abs()) {
            return Err(format!("alpha {k} recomputed as {x}, recorded {y}"));
        }
    }
    if !(a[0] * a[1] < 0.0) {
        return Err("alphas do not have opposite signs".into());
    }
    let (pg, ph) = (
        profile(g).map_err(|e| e.to_string())?,
        profile(h).map_err(|e| e.to_string())?,
    );
    let eps = transversality_profiles(&pg, &ph).map_err(|e| e.to_string())?;
    if !(eps > 0.0) {
        return Err("elements are not transversal".into());
    }
    Ok(())
}

pub(super) fn witness(c: &WitnessCert) -> Check {
    if c.entries.is_empty() {
        return Err("no entries".into());
    }
    let n = c.g.dim();
    if c.h.dim() != n || c.p1.len() != n || c.p2.len() != n {
        return Err("dimension mismatch".into());
    }
    let (eg, eh) = (ExactMap::from_map(&c.g), ExactMap::from_map(&c.h));
    let p1 = exact::vector_from_f64(&RealVector::from_column_slice(&c.p1));
    let p2 = exact::vector_from_f64(&RealVector::from_column_slice(&c.p2));
    let mut last = 0;
    for e in &c.entries {
        if e.n <= last || e.n > c.n_max || e.m == 0 {
            return Err(format!("bad exponent pair ({}, {})", e.n, e.m));
        }
        last = e.n;
        if e.y_exact.len() != n {
            return Err(format!("n = {}: point has the wrong dimension", e.n));
        }
        let y: Vec<Dyadic> = e
            .y_exact
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_, _>>()?;
        let product = exact_power(&eh, e.m).compose(&exact_power(&eg, e.n));
        let image = product.apply(&y);
        if !exact::strictly_within(&y, &p1, c.radius) {
            return Err(format!("n = {}: start point outside the first ball", e.n));
        }
        if !exact::strictly_within(&image, &p2, c.radius) {
            return Err(format!("n = {}: image outside the second ball", e.n));
        }
        let approx = exact::vector_to_f64(&image);
        let stated = RealVector::from_column_slice(&e.image);
        if (approx - &stated).norm() > 1e-6 * (1.0 + stated.norm()) {
            return Err(format!("n = {}: recorded image does not match", e.n));
        }
    }
    Ok(())
}

pub(super) fn scan(c: &ScanCert) -> Check {
    let n = c.center.len();
    let spec = GroupSpec::new(
        c.generators.clone(),
        AmbientGroup::generic(n, 0, 0),
        None,
        None,
    )
    .map_err(|e| e.to_string())?;
    let redo = proper_scan(
        &spec,
        &RealVector::from_column_slice(&c.center),
        c.radius,
        c.max_len,
        1,
    )
    .map_err(|e| e.to_string())?;
    let Certificate::EvidenceScan(redo) = redo else {
        return Err("unexpected certificate kind".into());
    };
    if redo.counts_by_length != c.counts_by_length {
        return Err("return counts differ on recomputation".into());
    }
    for (a, b) in redo.returns.iter().zip(&c.returns) {
        if a.word != b.word {
            return Err(format!("return set differs at {}", b.word_text));
        }
        if b.image_distance > c.radius {
            return Err(format!("{} does not return", b.word_text));
        }
    }
    Ok(())
}
