//! Explicit points showing that hᵐgⁿ carries a fixed ball back onto a fixed ball.
//!
//! For transversal hyperbolic g, h the affine subspaces E⁺(g) and E⁻(h) meet in
//! a line L. Points of L marching out along L are pulled by g⁻ⁿ onto the axis of
//! g near p₁ and pushed by hᵐ onto the axis of h near p₂. Opposite signs make the
//! two marching directions agree, which is what makes m positive.
//!
//! hᵐgⁿ expands by roughly s⁻²ⁿ, so the start points are held as exact dyadic
//! vectors and refined against the exact product until the image lands.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::exact::{self, Dyadic, ExactMap};
use super::Certificate;
use crate::affine::{invariant_axis, AffineMap, AffineSubspace};
use crate::dynamics::{profile, transversality_profiles};
use crate::error::{Error, Result};
use crate::linalg::{self, min_norm_solve, restrict, RealMatrix, RealVector};

const MAX_POLISH: usize = 12;
/// Singular values above this count as expanding directions during refinement.
const EXPANDING: f64 = 2.0;

/// Which configuration the pair is in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WitnessMode {
    /// α(g)·α(h) < 0.
    Signed { alpha_g: f64, alpha_h: f64 },
    /// h is a conjugate of g⁻¹ with t_h = −t_g.
    ConjugateInverse,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub n: u64,
    pub m: u64,
    /// Start point y with ‖y − p₁‖ < r, rounded.
    pub y: Vec<f64>,
    /// The same point exactly, as `<mantissa>p<exponent>` per coordinate.
    pub y_exact: Vec<String>,
    /// hᵐgⁿy, rounded.
    pub image: Vec<f64>,
    pub start_distance: f64,
    pub image_distance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessCert {
    pub g: AffineMap,
    pub h: AffineMap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub words: Option<[String; 2]>,
    pub mode: WitnessMode,
    pub transversality: f64,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub radius: f64,
    pub n_max: u64,
    /// Points p + n·w on L with n ↦ ‖hᵐgⁿ y‖ data, in increasing n.
    pub entries: Vec<WitnessEntry>,
}

impl WitnessCert {
    pub fn verified_exponents(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.n).collect()
    }
}

struct Geometry {
    p: RealVector,
    p1: RealVector,
    p2: RealVector,
    /// Step along L per unit of n.
    w: RealVector,
    t_g: RealVector,
    kappa: f64,
    /// Orthonormal basis of A⁺(g) and the matrix of g⁻¹ on it.
    q_plus: RealMatrix,
    r_plus: RealMatrix,
    eps: f64,
}

/// Coefficients c, z with x = c·t + Q z, or an error when x is not in span.
fn split_along(
    x: &RealVector,
    t: &RealVector,
    q: &RealMatrix,
    what: &str,
) -> Result<(f64, RealVector)> {
    let n = x.len();
    let mut a = RealMatrix::zeros(n, q.ncols() + 1);
    a.set_column(0, t);
    a.view_mut((0, 1), (n, q.ncols())).copy_from(q);
    let sol = min_norm_solve(&a, x);
    if (&a * &sol - x).norm() > 1e-7 * (1.0 + x.norm()) {
        return Err(Error::WitnessGeometry(format!(
            "{what} is not in the expected span"
        )));
    }
    Ok((sol[0], sol.rows(1, q.ncols()).into_owned()))
}

fn geometry(g: &AffineMap, h: &AffineMap, mode: &WitnessMode) -> Result<Geometry> {
    if g.dim() != h.dim() {
        return Err(Error::DimMismatch {
            expected: g.dim(),
            found: h.dim(),
        });
    }
    if g.distance(h) < 1e-12 {
        return Err(Error::NotTransversal { value: 0.0 });
    }
    let (pg, ph) = (profile(g)?, profile(h)?);
    if !pg.contracting() || !ph.contracting() {
        return Err(Error::NotHyperbolic);
    }
    let ax_g = invariant_axis(g, &pg.split)?;
    let ax_h = invariant_axis(h, &ph.split)?;
    let (t_g, t_h) = (ax_g.direction.clone(), ax_h.direction.clone());
    if t_g.norm() < 1e-12 || t_h.norm() < 1e-12 {
        return Err(Error::WitnessGeometry("an element fixes a point".into()));
    }
    let parallel = (t_g.dot(&t_h).abs() / (t_g.norm() * t_h.norm()) - 1.0).abs() < 1e-12;
    if parallel {
        if let Some(meet) = ax_g.line().intersection(&ax_h.line()) {
            let commuting = g.then_unchecked(h).distance(&h.then_unchecked(g)) < 1e-9;
            return Err(Error::AxesIntersect {
                point: meet.point.iter().copied().collect(),
                commuting,
            });
        }
    }
    let eps = transversality_profiles(&pg, &ph)?;
    if eps <= 1e-12 {
        return Err(Error::NotTransversal { value: eps });
    }
    match *mode {
        WitnessMode::Signed { alpha_g, alpha_h } => {
            if !(alpha_g * alpha_h < 0.0) {
                return Err(Error::WitnessGeometry("signs are not opposite".into()));
            }
        }
        WitnessMode::ConjugateInverse => {
            if (&t_g + &t_h).norm() > 1e-9 * t_g.norm() {
                return Err(Error::WitnessGeometry("t_h differs from -t_g".into()));
            }
        }
    }
    let line = ax_g
        .e_plus
        .intersection(&ax_h.e_minus)
        .ok_or_else(|| Error::WitnessGeometry("E+(g) and E-(h) are disjoint".into()))?;
    if line.space.dim() != 1 {
        return Err(Error::WitnessGeometry(format!(
            "E+(g) and E-(h) meet in dimension {}",
            line.space.dim()
        )));
    }
    let AffineSubspace { point: p, space } = line;
    let e = space.vectors().remove(0);
    let qg = pg.split.a_plus.basis().clone();
    let qh = ph.split.a_minus.basis().clone();

    let (c1, _) = split_along(&(&p - &ax_g.base_point), &t_g, &qg, "p - b_g")?;
    let p1 = &ax_g.base_point + &t_g * c1;
    let (c2, _) = split_along(&(&p - &ax_h.base_point), &t_h, &qh, "p - b_h")?;
    let p2 = &ax_h.base_point + &t_h * c2;

    let (mu, _) = split_along(&e, &t_g, &qg, "the direction of L")?;
    let (mu_h, _) = split_along(&e, &t_h, &qh, "the direction of L")?;
    if mu.abs() < 1e-12 || mu_h.abs() < 1e-12 {
        return Err(Error::WitnessGeometry(
            "L is parallel to an attracting space".into(),
        ));
    }
    let (lambda, lambda_h) = (1.0 / mu, 1.0 / mu_h);
    let kappa = -lambda / lambda_h;
    if !(kappa > 0.0) {
        return Err(Error::WitnessGeometry(
            "the two marching directions disagree".into(),
        ));
    }
    let inv = linalg::inverse(&g.linear).ok_or(Error::SingularMatrix(0.0))?;
    let r_plus = restrict(&inv, &pg.split.a_plus);
    Ok(Geometry {
        w: &e * lambda,
        p,
        p1,
        p2,
        t_g,
        kappa,
        q_plus: qg,
        r_plus,
        eps,
    })
}

fn norm2(v: &[Dyadic]) -> Dyadic {
    v.iter().fold(Dyadic::zero(), |acc, x| acc.add(&x.square()))
}

/// Refines y until hᵐgⁿy is within r/2 of p₂, correcting only along expanding
/// singular directions of the product.
fn polish(mut y: Vec<Dyadic>, product: &ExactMap, p2: &[Dyadic], r: f64) -> Option<Vec<Dyadic>> {
    let approx = product.to_map();
    if approx.linear.iter().any(|x| !x.is_finite()) {
        return None;
    }
    // Normalize before factoring so that squared entries stay in range.
    let scale = approx.linear.amax();
    let svd = linalg::svd(&(&approx.linear / scale));
    let (u, vt) = (svd.u?, svd.v_t?);
    let sigma: Vec<f64> = svd.singular_values.iter().map(|s| s * scale).collect();
    let target = Dyadic::from_f64(0.5 * r).square();
    for _ in 0..MAX_POLISH {
        let d: Vec<Dyadic> = product
            .apply(&y)
            .iter()
            .zip(p2)
            .map(|(a, b)| a.sub(b))
            .collect();
        if norm2(&d).cmp_value(&target).is_lt() {
            break;
        }
        let df = exact::vector_to_f64(&d);
        let mut step = RealVector::zeros(y.len());
        for (i, &s) in sigma.iter().enumerate() {
            if s > EXPANDING {
                let coeff = u.column(i).dot(&df) / s;
                step -= vt.row(i).transpose() * coeff;
            }
        }
        if step.iter().all(|x| *x == 0.0) || !step.iter().all(|x| x.is_finite()) {
            break;
        }
        y = exact::add_vectors(&y, &exact::vector_from_f64(&step));
    }
    Some(y)
}

/// Builds and checks witness points for n = 1..=n_max.
pub fn nonproper_witness(
    g: &AffineMap,
    h: &AffineMap,
    mode: WitnessMode,
    n_max: u64,
    radius: f64,
) -> Result<Certificate> {
    if !(radius > 0.0) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let geo = geometry(g, h, &mode)?;
    let (eg, eh) = (ExactMap::from_map(g), ExactMap::from_map(h));
    let p1x = exact::vector_from_f64(&geo.p1);
    let p2x = exact::vector_from_f64(&geo.p2);
    let base = &geo.p - &geo.p1;
    let tail = &geo.w - &geo.t_g;

    let mut entries = Vec::new();
    let mut g_pow = ExactMap::identity(g.dim());
    let mut h_pow = ExactMap::identity(g.dim());
    let mut m_done = 0u64;
    let mut r_pow = RealMatrix::identity(geo.r_plus.nrows(), geo.r_plus.nrows());
    let _ = (1..=n_max).try_for_each(|n| {
        g_pow = g_pow.compose(&eg);
        r_pow = &r_pow * &geo.r_plus;
        let m = (geo.kappa * n as f64).round() as u64;
        if m == 0 {
            return ControlFlow::Continue(());
        }
        while m_done < m {
            h_pow = h_pow.compose(&eh);
            m_done += 1;
        }
        let a = &base + &tail * n as f64;
        let y0 = &geo.p1 + &geo.q_plus * (&r_pow * (geo.q_plus.transpose() * a));
        if !y0.iter().all(|x| x.is_finite()) {
            return ControlFlow::Break(());
        }
        let product = h_pow.compose(&g_pow);
        let Some(y) = polish(exact::vector_from_f64(&y0), &product, &p2x, radius) else {
            return ControlFlow::Break(());
        };
        let image = product.apply(&y);
        if exact::strictly_within(&y, &p1x, radius) && exact::strictly_within(&image, &p2x, radius)
        {
            entries.push(WitnessEntry {
                n,
                m,
                y: exact::vector_to_f64(&y).iter().copied().collect(),
                y_exact: y.iter().map(|c| c.to_string()).collect(),
                image: exact::vector_to_f64(&image).iter().copied().collect(),
                start_distance: exact::dist_squared(&y, &p1x).to_f64().sqrt(),
                image_distance: exact::dist_squared(&image, &p2x).to_f64().sqrt(),
            });
        }
        ControlFlow::Continue(())
    });
    if entries.is_empty() {
        return Err(Error::NoVerifiedN(n_max));
    }
    Ok(Certificate::BallIntersectionWitness(WitnessCert {
        g: g.clone(),
        h: h.clone(),
        words: None,
        mode,
        transversality: geo.eps,
        p1: geo.p1.iter().copied().collect(),
        p2: geo.p2.iter().copied().collect(),
        radius,
        n_max,
        entries,
    }))
}
