//! Affine maps x ↦ Lx + v and their invariant axes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, check_dim, eigenvalues, kernel, min_norm_solve, min_singular_value, RealMatrix,
    RealVector, SpectralSplit, Subspace, DEFAULT_KERNEL_TOL,
};

/// Tolerance for the ker ⊕ im complement test in [`invariant_axis`].
const COMPLEMENT_TOL: f64 = 1e-7;
/// Minimum distance of every eigenvalue from 1 for [`fixed_point`].
const UNIT_EIGEN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MapRecord", into = "MapRecord")]
pub struct AffineMap {
    pub linear: RealMatrix,
    pub translation: RealVector,
    pub name: Option<String>,
}

/// Plain serialized form: row-major linear part and translation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub linear: Vec<Vec<f64>>,
    pub translation: Vec<f64>,
}

impl From<AffineMap> for MapRecord {
    fn from(a: AffineMap) -> Self {
        let n = a.dim();
        MapRecord {
            name: a.name,
            linear: (0..n)
                .map(|i| (0..n).map(|j| a.linear[(i, j)]).collect())
                .collect(),
            translation: a.translation.iter().copied().collect(),
        }
    }
}

impl TryFrom<MapRecord> for AffineMap {
    type Error = Error;

    fn try_from(r: MapRecord) -> Result<Self> {
        let n = r.translation.len();
        if r.linear.len() != n {
            return Err(Error::DimMismatch {
                expected: n,
                found: r.linear.len(),
            });
        }
        for row in &r.linear {
            if row.len() != n {
                return Err(Error::DimMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        let linear = RealMatrix::from_fn(n, n, |i, j| r.linear[i][j]);
        let mut a = AffineMap::new(linear, RealVector::from_vec(r.translation))?;
        a.name = r.name;
        Ok(a)
    }
}

impl AffineMap {
    /// Builds a map after checking shapes, finiteness and invertibility.
    pub fn new(linear: RealMatrix, translation: RealVector) -> Result<Self> {
        let n = translation.len();
        check_dim(n)?;
        if linear.nrows() != n || linear.ncols() != n {
            return Err(Error::DimMismatch {
                expected: n,
                found: linear.nrows(),
            });
        }
        if linear
            .iter()
            .chain(translation.iter())
            .any(|x| !x.is_finite())
        {
            return Err(Error::InvalidInput("non-finite entry".into()));
        }
        let det = linalg::determinant(&linear);
        if det.abs() < linalg::SINGULAR_DET {
            return Err(Error::SingularMatrix(det));
        }
        Ok(AffineMap {
            linear,
            translation,
            name: None,
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn identity(n: usize) -> Self {
        AffineMap {
            linear: RealMatrix::identity(n, n),
            translation: RealVector::zeros(n),
            name: None,
        }
    }

    pub fn translation(v: RealVector) -> Self {
        let n = v.len();
        AffineMap {
            linear: RealMatrix::identity(n, n),
            translation: v,
            name: None,
        }
    }

    pub fn linear(m: RealMatrix) -> Self {
        let n = m.nrows();
        AffineMap {
            linear: m,
            translation: RealVector::zeros(n),
            name: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn apply(&self, x: &RealVector) -> RealVector {
        &self.linear * x + &self.translation
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &AffineMap) -> Result<AffineMap> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.then_unchecked(other))
    }

    pub(crate) fn then_unchecked(&self, other: &AffineMap) -> AffineMap {
        AffineMap {
            linear: &self.linear * &other.linear,
            translation: &self.linear * &other.translation + &self.translation,
            name: None,
        }
    }

    pub fn inverse(&self) -> AffineMap {
        let inv = linalg::inverse(&self.linear).expect("linear part is invertible by construction");
        let t = -(&inv * &self.translation);
        AffineMap {
            linear: inv,
            translation: t,
            name: None,
        }
    }

    /// Integer power; negative exponents use the inverse.
    pub fn power(&self, n: i64) -> AffineMap {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = AffineMap::identity(self.dim());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then_unchecked(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.then_unchecked(&sq);
            }
        }
        acc
    }

    /// `t ∘ self ∘ t⁻¹`.
    pub fn conjugate_by(&self, t: &AffineMap) -> AffineMap {
        t.then_unchecked(self).then_unchecked(&t.inverse())
    }

    /// The (n+1)×(n+1) matrix [[L, v], [0, 1]].
    pub fn homogeneous_embed(&self) -> RealMatrix {
        let n = self.dim();
        let mut m = RealMatrix::identity(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&self.linear);
        m.view_mut((0, n), (n, 1)).copy_from(&self.translation);
        m
    }

    /// Max-entry distance between two maps.
    pub fn distance(&self, other: &AffineMap) -> f64 {
        let dl = (&self.linear - &other.linear).amax();
        let dt = (&self.translation - &other.translation).amax();
        dl.max(dt)
    }
}

/// An affine subspace `point + span`.
#[derive(Debug, Clone)]
pub struct AffineSubspace {
    pub point: RealVector,
    pub space: Subspace,
}

impl AffineSubspace {
    /// Intersection with another affine subspace, `None` when they are disjoint.
    pub fn intersection(&self, other: &AffineSubspace) -> Option<AffineSubspace> {
        let n = self.point.len();
        let (p, q) = (self.space.dim(), other.space.dim());
        let mut a = RealMatrix::zeros(n, p + q);
        a.view_mut((0, 0), (n, p)).copy_from(self.space.basis());
        a.view_mut((0, p), (n, q))
            .copy_from(&(-other.space.basis().clone()));
        let rhs = &other.point - &self.point;
        let scale = 1.0 + self.point.norm().max(other.point.norm());
        let point = if p + q == 0 {
            self.point.clone()
        } else {
            let sol = min_norm_solve(&a, &rhs);
            if (&a * &sol - &rhs).norm() > 1e-8 * scale {
                return None;
            }
            &self.point + self.space.basis() * sol.rows(0, p)
        };
        if p + q == 0 && rhs.norm() > 1e-8 * scale {
            return None;
        }
        Some(AffineSubspace {
            point,
            space: self.space.intersection(&other.space),
        })
    }

    pub fn distance_to_point(&self, x: &RealVector) -> f64 {
        self.space.residual(&(x - &self.point))
    }
}

/// The invariant line L_g with translation vector t_g and the derived affine subspaces.
#[derive(Debug, Clone)]
pub struct AffineAxis {
    pub base_point: RealVector,
    pub direction: RealVector,
    pub e_plus: AffineSubspace,
    pub e_minus: AffineSubspace,
    pub c_g: AffineSubspace,
}

impl AffineAxis {
    pub fn line(&self) -> AffineSubspace {
        let n = self.base_point.len();
        let space = if self.direction.norm() > 0.0 {
            Subspace::span(n, std::slice::from_ref(&self.direction))
        } else {
            Subspace::zero(n)
        };
        AffineSubspace {
            point: self.base_point.clone(),
            space,
        }
    }
}

/// Splits the translation along ker(L − I) ⊕ im(L − I) and returns the
/// invariant line closest to the origin.
pub fn invariant_axis(g: &AffineMap, split: &SpectralSplit) -> Result<AffineAxis> {
    let n = g.dim();
    let lm = &g.linear - RealMatrix::identity(n, n);
    let ker = kernel(&lm, DEFAULT_KERNEL_TOL);
    if ker.is_trivial() {
        return Err(Error::NoUnitEigenvalue);
    }
    let im = Subspace::span_columns(&lm);
    if ker.dim() + im.dim() != n {
        return Err(Error::NonSemisimpleNeutral { gap: 0.0 });
    }
    let mut stacked = RealMatrix::zeros(n, n);
    stacked
        .view_mut((0, 0), (n, ker.dim()))
        .copy_from(ker.basis());
    stacked
        .view_mut((0, ker.dim()), (n, im.dim()))
        .copy_from(im.basis());
    let gap = min_singular_value(&stacked);
    if gap < COMPLEMENT_TOL {
        return Err(Error::NonSemisimpleNeutral { gap });
    }
    let coeffs = stacked
        .clone()
        .lu()
        .solve(&g.translation)
        .ok_or(Error::NonSemisimpleNeutral { gap })?;
    let direction = ker.basis() * coeffs.rows(0, ker.dim());
    let v1 = &g.translation - &direction;
    let base_point = if im.is_trivial() {
        RealVector::zeros(n)
    } else {
        min_norm_solve(&lm, &(-v1))
    };

    let with_axis = |s: Subspace| {
        if direction.norm() > 0.0 {
            s.sum(&Subspace::span(n, std::slice::from_ref(&direction)))
        } else {
            s
        }
    };
    let e_plus = AffineSubspace {
        point: base_point.clone(),
        space: with_axis(split.d_plus()),
    };
    let e_minus = AffineSubspace {
        point: base_point.clone(),
        space: with_axis(split.d_minus()),
    };
    let c_g = AffineSubspace {
        point: base_point.clone(),
        space: e_plus.space.intersection(&e_minus.space),
    };
    Ok(AffineAxis {
        base_point,
        direction,
        e_plus,
        e_minus,
        c_g,
    })
}

/// Smallest distance from an eigenvalue of `m` to 1.
pub fn unit_eigen_distance(m: &RealMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?
        .iter()
        .map(|z| (z - 1.0).norm())
        .fold(f64::INFINITY, f64::min))
}

/// The unique fixed point of a map whose linear part lacks eigenvalue 1.
pub fn fixed_point(g: &AffineMap) -> Result<RealVector> {
    let distance = unit_eigen_distance(&g.linear)?;
    if distance <= UNIT_EIGEN_TOL {
        return Err(Error::UnitEigenvalue { distance });
    }
    let n = g.dim();
    let a = RealMatrix::identity(n, n) - &g.linear;
    let lu = a.clone().lu();
    let mut p = lu
        .solve(&g.translation)
        .ok_or(Error::UnitEigenvalue { distance })?;
    // One step of iterative refinement.
    let r = &g.translation - &a * &p;
    if let Some(dp) = lu.solve(&r) {
        p += dp;
    }
    Ok(p)
}
