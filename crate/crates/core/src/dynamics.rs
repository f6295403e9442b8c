//! Regularity, hyperbolicity and transversality of group elements.

use serde::{Deserialize, Serialize};

use crate::affine::AffineMap;
use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues, inverse, kernel_abs, min_singular_value, operator_norm, restrict, split, svd,
    RealMatrix, SpectralSplit, Subspace,
};
use crate::metric::{subspace_dist, subspace_hausdorff};

pub const MAX_POWER: u64 = 1_000_000;
/// Below this Hausdorff distance two attracting (or repelling) spaces count as equal.
const SAME_SPACE_TOL: f64 = 1e-9;
/// Minimum modulus ratio across the cut in [`profile_pair`].
const PAIR_GAP: f64 = 1.5;
const MAX_ORTHO_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AmbientKind {
    SoPq { p: usize, q: usize },
    Sl { n: usize },
    ProductSo21Sl3,
    Generic { n: usize },
}

/// The ambient group, carrying the minimal neutral and fixed dimensions of its
/// semisimple elements as declared data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientGroup {
    pub kind: AmbientKind,
    pub expected_neutral_dim: usize,
    pub expected_fixed_dim: usize,
}

impl AmbientGroup {
    pub fn so_pq(p: usize, q: usize) -> Self {
        let d = p.abs_diff(q);
        AmbientGroup {
            kind: AmbientKind::SoPq { p, q },
            expected_neutral_dim: d,
            expected_fixed_dim: d,
        }
    }

    /// SL(n) where the model's generic elements have `neutral` unit-modulus eigenvalues, all equal to 1.
    pub fn sl(n: usize, neutral: usize) -> Self {
        AmbientGroup {
            kind: AmbientKind::Sl { n },
            expected_neutral_dim: neutral,
            expected_fixed_dim: neutral,
        }
    }

    pub fn product_so21_sl3() -> Self {
        AmbientGroup {
            kind: AmbientKind::ProductSo21Sl3,
            expected_neutral_dim: 1,
            expected_fixed_dim: 1,
        }
    }

    pub fn generic(n: usize, neutral: usize, fixed: usize) -> Self {
        AmbientGroup {
            kind: AmbientKind::Generic { n },
            expected_neutral_dim: neutral,
            expected_fixed_dim: fixed,
        }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            AmbientKind::SoPq { p, q } => p + q,
            AmbientKind::Sl { n } | AmbientKind::Generic { n } => n,
            AmbientKind::ProductSo21Sl3 => 6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HyperbolicProfile {
    pub s: f64,
    pub norm_plus: f64,
    pub norm_minus: f64,
    pub eps_hyperbolic: f64,
    /// A⁺ or A⁻ is trivial, so s is not defined (stored as the defined part or 0).
    pub degenerate: bool,
    /// dim ker(l(g) − I).
    pub fixed_dim: usize,
    pub split: SpectralSplit,
}

impl HyperbolicProfile {
    /// Contracting data: both A⁺ and A⁻ nontrivial and s < 1.
    pub fn contracting(&self) -> bool {
        !self.degenerate && self.s < 1.0
    }

    pub fn regularity(&self, amb: &AmbientGroup) -> Regularity {
        Regularity {
            regular: self.fixed_dim == amb.expected_fixed_dim,
            r_regular: self.split.a_zero.dim() == amb.expected_neutral_dim,
        }
    }

    pub fn is_hyperbolic(&self, amb: &AmbientGroup) -> bool {
        self.regularity(amb).regular && self.contracting()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Regularity {
    pub regular: bool,
    pub r_regular: bool,
}

/// Dimension of the fixed space, computed inside the neutral part where the
/// restricted matrix has moderate norm.
fn fixed_dim(l: &RealMatrix, split: &SpectralSplit) -> usize {
    if split.a_zero.is_trivial() {
        return 0;
    }
    let r = restrict(l, &split.a_zero);
    let k = r.nrows();
    let scale = operator_norm(&r).max(1.0);
    kernel_abs(&(r - RealMatrix::identity(k, k)), 1e-8 * scale).dim()
}

/// ‖m⁻¹ on s‖ for an m-invariant s on which m expands, read off the expanding
/// restriction: a basis error δ then costs δ relative to ‖m‖ instead of δ·‖m⁻¹‖.
fn contracting_norm(m: &RealMatrix, s: &Subspace) -> f64 {
    if s.is_trivial() {
        return 0.0;
    }
    1.0 / min_singular_value(&restrict(m, s))
}

pub fn profile_linear(l: &RealMatrix) -> Result<HyperbolicProfile> {
    let split = split(l)?;
    let inv = inverse(l).ok_or(Error::SingularMatrix(0.0))?;
    let norm_minus = contracting_norm(&inv, &split.a_minus);
    let norm_plus = contracting_norm(l, &split.a_plus);
    let degenerate = split.a_plus.is_trivial() || split.a_minus.is_trivial();
    let eps_hyperbolic = if degenerate {
        0.0
    } else {
        subspace_dist(&split.a_plus, &split.d_minus())?
            .min(subspace_dist(&split.a_minus, &split.d_plus())?)
    };
    Ok(HyperbolicProfile {
        s: norm_plus.max(norm_minus),
        norm_plus,
        norm_minus,
        eps_hyperbolic,
        degenerate,
        fixed_dim: fixed_dim(l, &split),
        split,
    })
}

/// Profile of `l` from an independently computed inverse, for products whose
/// norm is too large to split or invert directly.
///
/// `dims` are the expected dimensions of A⁺ and A⁻. Every subspace is a
/// dominant one (of l, l⁻¹, lᵀ or l⁻ᵀ), split off at a threshold inside the
/// gap after the largest moduli, and every norm comes from the smallest
/// singular value of an expanding restriction. The neutral eigenvalues of such
/// products are known only to about ε·‖l‖ times their condition number, so
/// they are never classified.
pub fn profile_pair(
    l: &RealMatrix,
    l_inv: &RealMatrix,
    dims: (usize, usize),
) -> Result<HyperbolicProfile> {
    let n = l.nrows();
    let dominant = |m: &RealMatrix, k: usize| -> Result<Subspace> {
        if k == 0 {
            return Ok(Subspace::zero(n));
        }
        if k >= n {
            return Ok(Subspace::full(n));
        }
        let mut mods: Vec<f64> = eigenvalues(m)?.iter().map(|z| z.norm()).collect();
        mods.sort_by(|a, b| b.total_cmp(a));
        if !(mods[k - 1] > PAIR_GAP * mods[k]) {
            return Err(Error::AmbiguousModulus {
                modulus: mods[k],
                alpha: mods[k - 1],
            });
        }
        // Orthogonal iteration: each step is backward stable and gains the
        // factor |λ_{k+1}/λ_k|.
        let top = svd(m).u.expect("left factor").columns(0, k).into_owned();
        let mut q = Subspace::span_columns(&top);
        for _ in 0..MAX_ORTHO_ITER {
            let next = Subspace::span_columns(&(m * q.basis()));
            if next.dim() != k {
                return Err(Error::NoConvergence);
            }
            let moved = subspace_hausdorff(&next, &q)?;
            q = next;
            if moved < 1e-15 {
                break;
            }
        }
        Ok(q)
    };
    let a_plus = dominant(l, dims.0)?;
    let a_minus = dominant(l_inv, dims.1)?;
    let d_plus = dominant(&l_inv.transpose(), dims.1)?.orthogonal_complement();
    let d_minus = dominant(&l.transpose(), dims.0)?.orthogonal_complement();
    let a_zero = d_plus.intersection(&d_minus);
    let sp = SpectralSplit {
        a_plus,
        a_minus,
        a_zero,
        alpha: 1.0,
    };
    let norm_plus = contracting_norm(l, &sp.a_plus);
    let norm_minus = contracting_norm(l_inv, &sp.a_minus);
    let degenerate = sp.a_plus.is_trivial() || sp.a_minus.is_trivial();
    let eps_hyperbolic = if degenerate {
        0.0
    } else {
        subspace_dist(&sp.a_plus, &d_minus)?.min(subspace_dist(&sp.a_minus, &d_plus)?)
    };
    Ok(HyperbolicProfile {
        s: norm_plus.max(norm_minus),
        norm_plus,
        norm_minus,
        eps_hyperbolic,
        degenerate,
        fixed_dim: fixed_dim(l, &sp),
        split: sp,
    })
}

pub fn profile(g: &AffineMap) -> Result<HyperbolicProfile> {
    profile_linear(&g.linear)
}

pub fn is_regular(g: &AffineMap, amb: &AmbientGroup) -> Result<Regularity> {
    Ok(profile(g)?.regularity(amb))
}

fn spectral_radius(m: &RealMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Smallest N with s(g^N) < s_target.
///
/// A^± of g^N equal those of g, so s(g^N) is read off powers of the restricted
/// matrices instead of re-splitting ever larger products.
pub fn power_to_hyperbolic(g: &AffineMap, amb: &AmbientGroup, s_target: f64) -> Result<u64> {
    let _ = amb;
    if !(s_target > 0.0 && s_target < 1.0) {
        return Err(Error::InvalidInput(format!(
            "s_target {s_target} outside (0,1)"
        )));
    }
    let prof = profile(g)?;
    if prof.degenerate {
        return Err(Error::NotContracting);
    }
    let inv = inverse(&g.linear).ok_or(Error::SingularMatrix(0.0))?;
    let rm = restrict(&g.linear, &prof.split.a_minus);
    let rp = restrict(&inv, &prof.split.a_plus);
    let rate = spectral_radius(&rm)?.max(spectral_radius(&rp)?);
    if rate >= 1.0 {
        return Err(Error::NotContracting);
    }
    if (MAX_POWER as f64) * rate.ln() > s_target.ln() + 50.0 {
        return Err(Error::Overflow(MAX_POWER));
    }
    let (mut pm, mut pp) = (rm.clone(), rp.clone());
    for n in 1..=MAX_POWER {
        if operator_norm(&pm).max(operator_norm(&pp)) < s_target {
            return Ok(n);
        }
        pm = &pm * &rm;
        pp = &pp * &rp;
        // Keep the iterates away from underflow; only their norms matter.
        if pm.amax() < 1e-200 || pp.amax() < 1e-200 {
            return Ok(n + 1);
        }
    }
    Err(Error::Overflow(MAX_POWER))
}

/// ε-transversality of two contracting profiles.
///
/// Elements sharing an attracting or a repelling space (powers, equal
/// elements) are not counted as different hyperbolic elements and get 0.
pub fn transversality_profiles(a: &HyperbolicProfile, b: &HyperbolicProfile) -> Result<f64> {
    if !a.contracting() || !b.contracting() {
        return Err(Error::NotHyperbolic);
    }
    let (sa, sb) = (&a.split, &b.split);
    let shares = |x: &Subspace, y: &Subspace| -> Result<bool> {
        Ok(x.dim() == y.dim() && subspace_hausdorff(x, y)? < SAME_SPACE_TOL)
    };
    if shares(&sa.a_plus, &sb.a_plus)? || shares(&sa.a_minus, &sb.a_minus)? {
        return Ok(0.0);
    }
    let vals = [
        subspace_dist(&sa.a_plus, &sb.d_minus())?,
        subspace_dist(&sa.a_minus, &sb.d_plus())?,
        subspace_dist(&sb.a_plus, &sa.d_minus())?,
        subspace_dist(&sb.a_minus, &sa.d_plus())?,
    ];
    Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
}

pub fn transversality(g: &AffineMap, h: &AffineMap) -> Result<f64> {
    transversality_profiles(&profile(g)?, &profile(h)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductEstimates {
    pub gh_eps: f64,
    pub drift_plus: f64,
    pub drift_minus: f64,
    pub s_ratio: f64,
}

/// Hyperbolicity of gh and the drift of its dominant spaces away from those of g and h.
pub fn product_estimates(g: &AffineMap, h: &AffineMap, eps: f64) -> Result<ProductEstimates> {
    let (pg, ph) = (profile(g)?, profile(h)?);
    if !pg.contracting() || !ph.contracting() || pg.eps_hyperbolic < eps || ph.eps_hyperbolic < eps
    {
        return Err(Error::NotHyperbolic);
    }
    let t = transversality_profiles(&pg, &ph)?;
    if t < eps || t == 0.0 {
        return Err(Error::NotTransversal { value: t });
    }
    let inv = |m: &RealMatrix| inverse(m).ok_or(Error::SingularMatrix(0.0));
    let (gi, hi) = (inv(&g.linear)?, inv(&h.linear)?);
    let dims = |p: &HyperbolicProfile| (p.split.a_plus.dim(), p.split.a_minus.dim());
    // All three from dominant spaces, so the drifts compare like with like.
    let pg = profile_pair(&g.linear, &gi, dims(&pg))?;
    let ph = profile_pair(&h.linear, &hi, dims(&ph))?;
    let pgh = profile_pair(
        &(&g.linear * &h.linear),
        &(hi * gi),
        (dims(&pg).0, dims(&ph).1),
    )?;
    if pgh.degenerate {
        return Err(Error::NotHyperbolic);
    }
    Ok(ProductEstimates {
        gh_eps: pgh.eps_hyperbolic,
        drift_plus: subspace_hausdorff(&pgh.split.a_plus, &pg.split.a_plus)? / pg.s,
        drift_minus: subspace_hausdorff(&pgh.split.a_minus, &ph.split.a_minus)? / ph.s,
        s_ratio: pgh.s / (pg.s * ph.s),
    })
}

/// Whether l(t)·w ⊕ D⁺(g) = V.
pub fn transversal_pair_test(g: &AffineMap, t: &AffineMap, w: &Subspace) -> Result<bool> {
    let n = g.dim();
    let d_plus = split(&g.linear)?.d_plus();
    if w.dim() + d_plus.dim() != n || w.ambient_dim() != n {
        return Err(Error::DimMismatch {
            expected: n - d_plus.dim(),
            found: w.dim(),
        });
    }
    let tw = w.image(&t.linear);
    if tw.dim() != w.dim() {
        return Ok(false);
    }
    let mut stacked = RealMatrix::zeros(n, n);
    stacked
        .view_mut((0, 0), (n, tw.dim()))
        .copy_from(tw.basis());
    stacked
        .view_mut((0, tw.dim()), (n, d_plus.dim()))
        .copy_from(d_plus.basis());
    Ok(min_singular_value(&stacked) > 1e-8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{direct_sum, from_rows, vector};
    use crate::models::{boost, rotation_xy};
    use std::f64::consts::{FRAC_PI_2, LN_2};

    #[test]
    fn profile_examples() {
        let p = profile(&AffineMap::linear(boost(LN_2))).unwrap();
        assert!((p.s - 0.5).abs() < 1e-14);
        assert!((p.eps_hyperbolic - 1.0).abs() < 1e-14);
        let p2 = profile(&AffineMap::linear(boost(LN_2) * boost(LN_2))).unwrap();
        assert!((p2.s - 0.25).abs() < 1e-14);
        let pi = profile(&AffineMap::identity(3)).unwrap();
        assert!(pi.degenerate && pi.s == 0.0 && !pi.contracting());
    }

    #[test]
    fn regularity_examples() {
        let so21 = AmbientGroup::so_pq(2, 1);
        let r = is_regular(&AffineMap::linear(boost(LN_2)), &so21).unwrap();
        assert!(r.regular && r.r_regular);
        let r = is_regular(&AffineMap::identity(3), &so21).unwrap();
        assert!(!r.r_regular);
        let d = RealMatrix::from_diagonal(&vector(&[4.0, 1.0, 0.25]));
        assert!(
            is_regular(&AffineMap::linear(d), &AmbientGroup::sl(3, 1))
                .unwrap()
                .r_regular
        );
    }

    #[test]
    fn power_examples() {
        let g = AffineMap::linear(boost(LN_2));
        let so21 = AmbientGroup::so_pq(2, 1);
        assert_eq!(power_to_hyperbolic(&g, &so21, 0.1).unwrap(), 4);
        assert_eq!(power_to_hyperbolic(&g, &so21, 0.6).unwrap(), 1);
        let rot = AffineMap::linear(from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]));
        assert!(matches!(
            power_to_hyperbolic(&rot, &AmbientGroup::generic(2, 2, 0), 0.5),
            Err(Error::NotContracting)
        ));
        let slow = AffineMap::linear(boost(1e-7));
        assert!(matches!(
            power_to_hyperbolic(&slow, &so21, 1e-300),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn transversality_examples() {
        let g = AffineMap::linear(boost(LN_2));
        assert!(transversality(&g, &g.inverse()).unwrap() < 1e-12);
        assert_eq!(transversality(&g, &g).unwrap(), 0.0);
        let r = AffineMap::linear(rotation_xy(FRAC_PI_2));
        let h = g.conjugate_by(&r);
        let t = transversality(&g, &h).unwrap();
        assert!((t - 0.5).abs() < 1e-12, "{t}");
        assert!(matches!(
            transversality(&g, &AffineMap::identity(3)),
            Err(Error::NotHyperbolic)
        ));
    }

    #[test]
    fn product_estimate_examples() {
        let g = AffineMap::linear(boost(10.0 * LN_2));
        let r = AffineMap::linear(rotation_xy(FRAC_PI_2));
        let h = g.conjugate_by(&r);
        let eps = 0.5 - 1e-9;
        let e = product_estimates(&g, &h, eps).unwrap();
        assert!(e.gh_eps >= eps / 2.0);

        let g1 = AffineMap::linear(boost(LN_2));
        assert!(matches!(
            product_estimates(&g1, &g1, 0.1),
            Err(Error::NotTransversal { .. })
        ));

        let at = |k: f64| {
            let g = AffineMap::linear(boost(k * LN_2));
            product_estimates(&g, &g.conjugate_by(&r), eps)
                .unwrap()
                .drift_plus
        };
        let (d8, d16) = (at(8.0), at(16.0));
        assert!(d8 / d16 < 4.0 && d16 / d8 < 4.0, "{d8} {d16}");
    }

    #[test]
    fn transversal_pair_examples() {
        let g = AffineMap::linear(boost(LN_2));
        let a_plus = split(&g.linear).unwrap().a_plus;
        assert!(!transversal_pair_test(&g, &AffineMap::identity(3), &a_plus).unwrap());
        let r = AffineMap::linear(rotation_xy(FRAC_PI_2));
        assert!(transversal_pair_test(&g, &r, &a_plus).unwrap());
        let full = Subspace::full(3);
        assert!(matches!(
            transversal_pair_test(&g, &r, &full),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn product_ambient_dims() {
        let m = direct_sum(
            &boost(LN_2),
            &RealMatrix::from_diagonal(&vector(&[4.0, 3.0, 1.0 / 12.0])),
        );
        let p = profile(&AffineMap::linear(m)).unwrap();
        assert!(p.is_hyperbolic(&AmbientGroup::product_so21_sl3()));
    }
}
