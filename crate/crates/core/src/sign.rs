//! Orientations of isotropic subspaces and the Margulis sign.
//!
//! A form of signature (p,q) comes with a basis v₁..v_p, w₁..w_q in which it is
//! diag(+1..+1, −1..−1). X is spanned by the vᵢ and Y by the wⱼ. An isotropic
//! subspace W of dimension q projects isomorphically onto Y, and W^⊥ (dimension
//! p) projects isomorphically onto X, so both inherit orientations from the
//! reference bases. Every orientation decision below is the sign of a determinant
//! of coordinates in those bases.

use serde::{Deserialize, Serialize};

use crate::affine::{invariant_axis, AffineAxis, AffineMap};
use crate::error::{Error, Result};
use crate::linalg::{null_space, split, RealMatrix, RealVector, Subspace, DEFAULT_KERNEL_TOL};
use crate::metric::subspace_hausdorff;

const ISOMETRY_TOL: f64 = 1e-8;
const ISOTROPY_TOL: f64 = 1e-9;
const DET_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "FormRecord", into = "FormRecord")]
pub struct QuadraticForm {
    pub p: usize,
    pub q: usize,
    /// Columns v₁..v_p, w₁..w_q.
    basis: RealMatrix,
    /// Inverse of `basis`: coordinates in the form basis.
    coords: RealMatrix,
    /// Gram matrix in standard coordinates.
    gram: RealMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormRecord {
    pub p: usize,
    pub q: usize,
    /// Basis vectors v₁..v_p, w₁..w_q.
    pub basis: Vec<Vec<f64>>,
}

impl From<QuadraticForm> for FormRecord {
    fn from(f: QuadraticForm) -> Self {
        FormRecord {
            p: f.p,
            q: f.q,
            basis: f
                .basis
                .column_iter()
                .map(|c| c.iter().copied().collect())
                .collect(),
        }
    }
}

impl TryFrom<FormRecord> for QuadraticForm {
    type Error = Error;

    fn try_from(r: FormRecord) -> Result<Self> {
        let n = r.p + r.q;
        if r.basis.len() != n || r.basis.iter().any(|v| v.len() != n) {
            return Err(Error::DimMismatch {
                expected: n,
                found: r.basis.len(),
            });
        }
        let cols: Vec<RealVector> = r
            .basis
            .iter()
            .map(|v| RealVector::from_column_slice(v))
            .collect();
        QuadraticForm::with_basis(r.p, r.q, RealMatrix::from_columns(&cols))
    }
}

impl QuadraticForm {
    /// The form diag(+1..+1, −1..−1) on the standard basis.
    pub fn standard(p: usize, q: usize) -> Self {
        Self::with_basis(p, q, RealMatrix::identity(p + q, p + q)).expect("identity basis")
    }

    pub fn with_basis(p: usize, q: usize, basis: RealMatrix) -> Result<Self> {
        let n = p + q;
        if basis.nrows() != n || basis.ncols() != n {
            return Err(Error::DimMismatch {
                expected: n,
                found: basis.nrows(),
            });
        }
        let coords = crate::linalg::inverse(&basis).ok_or(Error::SingularMatrix(0.0))?;
        let diag = RealMatrix::from_fn(n, n, |i, j| match (i == j, i < p) {
            (true, true) => 1.0,
            (true, false) => -1.0,
            _ => 0.0,
        });
        let gram = coords.transpose() * diag * &coords;
        Ok(QuadraticForm {
            p,
            q,
            basis,
            coords,
            gram,
        })
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    pub fn basis(&self) -> &RealMatrix {
        &self.basis
    }

    pub fn gram(&self) -> &RealMatrix {
        &self.gram
    }

    pub fn b(&self, x: &RealVector, y: &RealVector) -> f64 {
        (x.transpose() * &self.gram * y)[(0, 0)]
    }

    pub fn x_space(&self) -> Subspace {
        Subspace::span_columns(&self.basis.columns(0, self.p).into_owned())
    }

    pub fn y_space(&self) -> Subspace {
        Subspace::span_columns(&self.basis.columns(self.p, self.q).into_owned())
    }

    /// Coordinates of the columns of `m` along v₁..v_p (the π_X part).
    fn x_coords(&self, m: &RealMatrix) -> RealMatrix {
        (&self.coords * m).rows(0, self.p).into_owned()
    }

    /// Coordinates of the columns of `m` along w₁..w_q (the π_Y part).
    fn y_coords(&self, m: &RealMatrix) -> RealMatrix {
        (&self.coords * m).rows(self.p, self.q).into_owned()
    }

    /// Relative defect ‖LᵗGL − G‖ / max(1, ‖L‖²).
    pub fn isometry_residual(&self, l: &RealMatrix) -> f64 {
        let r = l.transpose() * &self.gram * l - &self.gram;
        r.norm() / l.norm_squared().max(1.0)
    }

    pub fn preserves(&self, l: &RealMatrix) -> bool {
        self.isometry_residual(l) < ISOMETRY_TOL
    }

    /// The B-orthogonal complement.
    pub fn perp(&self, w: &Subspace) -> Subspace {
        if w.is_trivial() {
            return Subspace::full(self.dim());
        }
        null_space(&(w.basis().transpose() * &self.gram), DEFAULT_KERNEL_TOL)
    }

    pub fn is_isotropic(&self, w: &Subspace) -> bool {
        let g = w.basis().transpose() * &self.gram * w.basis();
        g.amax() < ISOTROPY_TOL
    }

    fn require_maximal_isotropic(&self, w: &Subspace) -> Result<()> {
        if w.dim() != self.q || w.ambient_dim() != self.dim() || !self.is_isotropic(w) {
            return Err(Error::NotMaximalIsotropic);
        }
        Ok(())
    }

    /// A basis of the isotropic `w` that is positive under π_Y.
    fn positive_isotropic_basis(&self, w: &Subspace) -> Result<RealMatrix> {
        let mut b = w.basis().clone();
        let d = self.y_coords(&b).determinant();
        if d.abs() < DET_TOL {
            return Err(Error::DegenerateProjection);
        }
        if d < 0.0 {
            b.column_mut(0).neg_mut();
        }
        Ok(b)
    }

    /// The vector ±z, normalized to B = 1, for which (positive basis of `w`, z)
    /// is positive in W^⊥ under π_X. Requires p = q + 1 and z ∈ W^⊥ \ W.
    pub fn orient_complement(&self, w: &Subspace, z: &RealVector) -> Result<RealVector> {
        self.require_maximal_isotropic(w)?;
        if self.p != self.q + 1 {
            return Err(Error::UnsupportedSignature {
                p: self.p,
                q: self.q,
            });
        }
        let wb = self.positive_isotropic_basis(w)?;
        let mut full = RealMatrix::zeros(self.dim(), self.p);
        full.view_mut((0, 0), (self.dim(), self.q)).copy_from(&wb);
        full.set_column(self.q, z);
        let d = self.x_coords(&full).determinant();
        if d.abs() < DET_TOL {
            return Err(Error::DegenerateProjection);
        }
        let bzz = self.b(z, z);
        if bzz <= 0.0 {
            return Err(Error::DegenerateProjection);
        }
        Ok(z * (d.signum() / bzz.sqrt()))
    }
}

/// v⁰(D⁺) ∈ A⁰ for a maximal isotropic A⁺.
pub fn oriented_neutral_vector(
    form: &QuadraticForm,
    a_plus: &Subspace,
    split: &crate::linalg::SpectralSplit,
) -> Result<RealVector> {
    form.require_maximal_isotropic(a_plus)?;
    if split.a_zero.dim() != 1 {
        return Err(Error::NeutralDimWrong(split.a_zero.dim()));
    }
    form.orient_complement(a_plus, &split.a_zero.vectors()[0])
}

#[derive(Debug, Clone)]
pub struct SignResult {
    pub alpha: f64,
    pub neutral_vector: RealVector,
    pub axis: AffineAxis,
}

/// Margulis sign for signature (k+1, k), evaluated at the origin.
pub fn margulis_alpha(g: &AffineMap, form: &QuadraticForm) -> Result<SignResult> {
    margulis_alpha_at(g, form, &RealVector::zeros(g.dim()))
}

/// Margulis sign evaluated at the base point `x`; the value does not depend on `x`.
pub fn margulis_alpha_at(
    g: &AffineMap,
    form: &QuadraticForm,
    x: &RealVector,
) -> Result<SignResult> {
    if form.p != form.q + 1 {
        return Err(Error::UnsupportedSignature {
            p: form.p,
            q: form.q,
        });
    }
    if g.dim() != form.dim() {
        return Err(Error::DimMismatch {
            expected: form.dim(),
            found: g.dim(),
        });
    }
    let residual = form.isometry_residual(&g.linear);
    if residual >= ISOMETRY_TOL {
        return Err(Error::NotIsometry { residual });
    }
    let sp = split(&g.linear)?;
    if sp.a_zero.dim() != 1 || sp.a_plus.dim() != form.q {
        return Err(Error::NotRRegular {
            neutral_dim: sp.a_zero.dim(),
        });
    }
    let v = oriented_neutral_vector(form, &sp.a_plus, &sp)?;
    let alpha = form.b(&(g.apply(x) - x), &v);
    let axis = invariant_axis(g, &sp)?;
    Ok(SignResult {
        alpha,
        neutral_vector: v,
        axis,
    })
}

/// The transported orientations v⁰(V₁^⊥) and v⁰(V₂^⊥) on V₁^⊥ ∩ V₂^⊥ for a
/// transversal pair of maximal isotropic subspaces.
pub fn transported_orientations(
    form: &QuadraticForm,
    v1: &Subspace,
    v2: &Subspace,
) -> Result<(RealVector, RealVector)> {
    form.require_maximal_isotropic(v1)?;
    form.require_maximal_isotropic(v2)?;
    let common = form.perp(v1).intersection(&form.perp(v2));
    if common.dim() != 1 {
        return Err(Error::EqualSubspaces);
    }
    let z = common.vectors().remove(0);
    Ok((
        form.orient_complement(v1, &z)?,
        form.orient_complement(v2, &z)?,
    ))
}

/// The standard pair V₁ = span{wᵢ + vᵢ}, V₂ = span{wᵢ − vᵢ} in signature (k+1, k).
pub fn standard_isotropic_pair(k: usize) -> (QuadraticForm, Subspace, Subspace) {
    let form = QuadraticForm::standard(k + 1, k);
    let n = 2 * k + 1;
    let make = |sign: f64| {
        let cols: Vec<RealVector> = (0..k)
            .map(|i| {
                let mut v = RealVector::zeros(n);
                v[k + 1 + i] = 1.0;
                v[i] = sign;
                v
            })
            .collect();
        Subspace::span(n, &cols)
    };
    (form, make(1.0), make(-1.0))
}

/// V = V₁ ⊕ V₂ with SO(2,1) acting on V₁ and SL₃ on V₂.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SplitRecord", into = "SplitRecord")]
pub struct ProductSplit {
    /// Columns: the (2,1) form basis v₁, v₂, w₁ of V₁.
    e1: RealMatrix,
    /// Columns: a basis of V₂.
    e2: RealMatrix,
    coords: RealMatrix,
    pub form_on_v1: QuadraticForm,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitRecord {
    pub v1: Vec<Vec<f64>>,
    pub v2: Vec<Vec<f64>>,
}

impl From<ProductSplit> for SplitRecord {
    fn from(s: ProductSplit) -> Self {
        let cols = |m: &RealMatrix| {
            m.column_iter()
                .map(|c| c.iter().copied().collect())
                .collect()
        };
        SplitRecord {
            v1: cols(&s.e1),
            v2: cols(&s.e2),
        }
    }
}

impl TryFrom<SplitRecord> for ProductSplit {
    type Error = Error;

    fn try_from(r: SplitRecord) -> Result<Self> {
        let mat = |v: &Vec<Vec<f64>>| -> Result<RealMatrix> {
            if v.len() != 3 || v.iter().any(|c| c.len() != 6) {
                return Err(Error::DimMismatch {
                    expected: 6,
                    found: v.len(),
                });
            }
            let cols: Vec<RealVector> =
                v.iter().map(|c| RealVector::from_column_slice(c)).collect();
            Ok(RealMatrix::from_columns(&cols))
        };
        ProductSplit::new(mat(&r.v1)?, mat(&r.v2)?)
    }
}

impl ProductSplit {
    pub fn new(e1: RealMatrix, e2: RealMatrix) -> Result<Self> {
        if e1.shape() != (6, 3) || e2.shape() != (6, 3) {
            return Err(Error::DimMismatch {
                expected: 6,
                found: e1.nrows(),
            });
        }
        if (e1.transpose() * &e2).amax() > 1e-10 {
            return Err(Error::NotProductCompatible(
                "V1 and V2 are not orthogonal".into(),
            ));
        }
        let mut full = RealMatrix::zeros(6, 6);
        full.view_mut((0, 0), (6, 3)).copy_from(&e1);
        full.view_mut((0, 3), (6, 3)).copy_from(&e2);
        let coords = crate::linalg::inverse(&full).ok_or(Error::SingularMatrix(0.0))?;
        Ok(ProductSplit {
            e1,
            e2,
            coords,
            form_on_v1: QuadraticForm::standard(2, 1),
        })
    }

    /// V₁ = first three coordinates, V₂ = last three.
    pub fn standard() -> Self {
        let id = RealMatrix::identity(6, 6);
        Self::new(id.columns(0, 3).into_owned(), id.columns(3, 3).into_owned()).expect("standard")
    }

    pub fn v1(&self) -> Subspace {
        Subspace::span_columns(&self.e1)
    }

    pub fn v2(&self) -> Subspace {
        Subspace::span_columns(&self.e2)
    }

    pub fn e1(&self) -> &RealMatrix {
        &self.e1
    }

    /// Projection to V₁ along V₂, as V₁-coordinates.
    pub fn pi1_coords(&self, x: &RealVector) -> RealVector {
        (&self.coords * x).rows(0, 3).into_owned()
    }

    /// The induced actions θ₁ on V₁ and θ₂ on V₂, in the bases of V₁ and V₂.
    /// Requires V₁ or V₂ to be invariant, so that one block acts by restriction
    /// and the other on the quotient.
    pub fn blocks(&self, l: &RealMatrix) -> Result<(RealMatrix, RealMatrix)> {
        let mut full = RealMatrix::zeros(6, 6);
        full.view_mut((0, 0), (6, 3)).copy_from(&self.e1);
        full.view_mut((0, 3), (6, 3)).copy_from(&self.e2);
        let m = &self.coords * l * full;
        let scale = l.norm().max(1.0) * 1e-8;
        let upper = m.view((0, 3), (3, 3)).amax();
        let lower = m.view((3, 0), (3, 3)).amax();
        if upper > scale && lower > scale {
            return Err(Error::NotProductCompatible(
                "neither V1 nor V2 is invariant".into(),
            ));
        }
        Ok((
            m.view((0, 0), (3, 3)).into_owned(),
            m.view((3, 3), (3, 3)).into_owned(),
        ))
    }

    pub fn theta1(&self, l: &RealMatrix) -> Result<RealMatrix> {
        Ok(self.blocks(l)?.0)
    }

    pub fn theta2(&self, l: &RealMatrix) -> Result<RealMatrix> {
        Ok(self.blocks(l)?.1)
    }
}

/// Sign for the six-dimensional product case.
///
/// v_g is the vector of A⁰(g) whose projection to V₁ along V₂ is v₊ of θ₁(g).
/// Since A⁰(g) = ker(l(g) − I) here, the translation part t_g of g along its
/// axis lies in A⁰(g) and α is its coefficient: t_g = α·v_g.
pub fn extended_alpha(g: &AffineMap, ps: &ProductSplit) -> Result<SignResult> {
    if g.dim() != 6 {
        return Err(Error::DimMismatch {
            expected: 6,
            found: g.dim(),
        });
    }
    let sp = split(&g.linear)?;
    if sp.a_zero.dim() != 1 {
        return Err(Error::NeutralDimWrong(sp.a_zero.dim()));
    }
    let theta1 = ps.theta1(&g.linear)?;
    if !ps.form_on_v1.preserves(&theta1) {
        return Err(Error::NotProductCompatible(
            "V1 block is not in SO(2,1)".into(),
        ));
    }
    let sp1 = split(&theta1)?;
    if sp1.a_zero.dim() != 1 || sp1.a_plus.dim() != 1 {
        return Err(Error::NotProductCompatible(
            "V1 block is not hyperbolic".into(),
        ));
    }
    let vplus = oriented_neutral_vector(&ps.form_on_v1, &sp1.a_plus, &sp1)?;
    let z = sp.a_zero.vectors().remove(0);
    let pz = ps.pi1_coords(&z);
    let c = pz.dot(&vplus) / pz.norm_squared();
    if (&pz * c - &vplus).norm() > 1e-6 * vplus.norm() {
        return Err(Error::NotProductCompatible(
            "A0 does not project onto the V1 neutral line".into(),
        ));
    }
    let v_g = z * c;
    let axis = invariant_axis(g, &sp)?;
    let alpha = axis.direction.dot(&v_g) / v_g.norm_squared();
    Ok(SignResult {
        alpha,
        neutral_vector: v_g,
        axis,
    })
}

#[derive(Debug, Clone)]
pub struct PhiSide {
    pub side: i8,
    pub alpha_w: f64,
    pub w0: RealVector,
}

/// Which component of the isotropic lines relative to `u` contains `w`, in signature (2,1).
pub fn phi_side(form: &QuadraticForm, u: &Subspace, w: &Subspace) -> Result<PhiSide> {
    if form.p != 2 || form.q != 1 {
        return Err(Error::UnsupportedSignature {
            p: form.p,
            q: form.q,
        });
    }
    for s in [u, w] {
        if s.dim() != 1 || !form.is_isotropic(s) {
            return Err(Error::NotIsotropic);
        }
    }
    if subspace_hausdorff(u, w)? < 1e-9 {
        return Err(Error::EqualSubspaces);
    }
    let w1 = form.basis.column(2).into_owned();
    let u0 = u.vectors().remove(0);
    let uy = form.y_coords(&RealMatrix::from_columns(std::slice::from_ref(&u0)))[(0, 0)];
    if uy.abs() < DET_TOL {
        return Err(Error::DegenerateProjection);
    }
    let v = u0 / uy;
    // v₀ spans u^⊥ ∩ X, oriented so that (π_X v, v₀) matches (v₁, v₂).
    let x = form.x_space();
    let v0_line = form.perp(u).intersection(&x);
    if v0_line.dim() != 1 {
        return Err(Error::DegenerateProjection);
    }
    let z = v0_line.vectors().remove(0);
    let d = form
        .x_coords(&RealMatrix::from_columns(&[v.clone(), z.clone()]))
        .determinant();
    if d.abs() < DET_TOL {
        return Err(Error::DegenerateProjection);
    }
    let v0 = &z * (d.signum() / form.b(&z, &z).sqrt());

    let wv = w.vectors().remove(0);
    let alpha_w = -form.b(&v0, &wv) / form.b(&v, &wv);
    let w0 = &v0 + &v * alpha_w;
    if (form.b(&w0, &w1) + alpha_w).abs() > 1e-9 * (1.0 + alpha_w.abs()) {
        return Err(Error::DegenerateProjection);
    }
    if alpha_w.abs() < 1e-12 {
        return Err(Error::OnSeparatingPlane);
    }
    Ok(PhiSide {
        side: if alpha_w > 0.0 { 1 } else { -1 },
        alpha_w,
        w0,
    })
}
