//! Dense real linear algebra at small fixed dimension.
//!
//! Everything here works on `DMatrix<f64>` with dimension at most 8. The
//! centerpiece is [`spectral_split`], which separates the expanding, contracting
//! and neutral invariant subspaces of a matrix relative to a modulus threshold.

use nalgebra::{Complex, DMatrix, DVector, Dyn, Schur, SVD};

use crate::error::{Error, Result};

pub type RealMatrix = DMatrix<f64>;
pub type RealVector = DVector<f64>;

pub const MAX_DIM: usize = 8;
pub const DEFAULT_KERNEL_TOL: f64 = 1e-8;
pub const DEFAULT_UNIT_BAND: f64 = 1e-9;
pub const SINGULAR_DET: f64 = 1e-12;

/// Eigenvalues whose distance to the threshold lies in `(band, GUARD * band]`
/// are rejected as ambiguous.
const AMBIGUITY_GUARD: f64 = 4.0;
/// Multiple of machine epsilon times the matrix norm below which a modulus
/// is considered indistinguishable from the threshold.
const ROUNDOFF_FLOOR: f64 = 64.0;

pub fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::DimensionOutOfRange(n));
    }
    Ok(())
}

/// Singular value decomposition by one-sided Jacobi rotations.
///
/// nalgebra's bidiagonal SVD is not used: depending on its tolerance it either
/// stops early or returns factors that do not reproduce the input. Jacobi is
/// accurate to a few ulps at the sizes used here. Singular values come out in
/// descending order; the factors are always computed.
pub fn svd(m: &RealMatrix) -> SVD<f64, Dyn, Dyn> {
    assert!(m.iter().all(|x| x.is_finite()), "non-finite matrix");
    if m.nrows() < m.ncols() {
        let t = jacobi_svd(&m.transpose());
        return SVD {
            u: t.v_t.map(|v| v.transpose()),
            v_t: t.u.map(|u| u.transpose()),
            singular_values: t.singular_values,
        };
    }
    jacobi_svd(m)
}

fn jacobi_svd(m: &RealMatrix) -> SVD<f64, Dyn, Dyn> {
    let (r, c) = m.shape();
    let mut a = m.clone();
    let mut v = RealMatrix::identity(c, c);
    for _ in 0..80 {
        let mut rotated = false;
        for p in 0..c {
            for q in p + 1..c {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dot(&a.column(q));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let cs = 1.0 / t.hypot(1.0);
                let sn = cs * t;
                for mat in [&mut a, &mut v] {
                    for i in 0..mat.nrows() {
                        let (x, y) = (mat[(i, p)], mat[(i, q)]);
                        mat[(i, p)] = cs * x - sn * y;
                        mat[(i, q)] = sn * x + cs * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..c).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let smax = norms.iter().cloned().fold(0.0, f64::max);
    let mut u = RealMatrix::zeros(r, c);
    let mut vs = RealMatrix::zeros(c, c);
    let mut sigma = RealVector::zeros(c);
    let mut missing = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        sigma[k] = norms[j];
        vs.set_column(k, &v.column(j));
        // Columns with small singular values are only accurate up to the
        // rounding of the large ones, so they are re-orthogonalized.
        let mut w = a.column(j) / norms[j].max(f64::MIN_POSITIVE);
        for _ in 0..2 {
            for i in 0..k {
                let ui = u.column(i).into_owned();
                w -= &ui * ui.dot(&w);
            }
        }
        if norms[j] > f64::EPSILON * smax && w.norm() > 0.5 {
            u.set_column(k, &(&w / w.norm()));
        } else {
            missing.push(k);
        }
    }
    // Left vectors of zero singular values: complete to an orthonormal set
    // with the coordinate vector that has the largest remaining component.
    for k in missing {
        let best = (0..r)
            .map(|e| {
                let mut w = RealVector::zeros(r);
                w[e] = 1.0;
                for _ in 0..2 {
                    for j in 0..c {
                        let uj = u.column(j).into_owned();
                        w -= &uj * uj.dot(&w);
                    }
                }
                w
            })
            .max_by(|x, y| x.norm().total_cmp(&y.norm()))
            .expect("at least one row");
        u.set_column(k, &(&best / best.norm()));
    }
    SVD {
        u: Some(u),
        v_t: Some(vs.transpose()),
        singular_values: sigma,
    }
}

/// Singular values (descending) with the matching right singular vectors as
/// columns. Works for any shape; rows are zero-padded so the right factor is
/// always complete.
fn svd_full_right(m: &RealMatrix) -> (Vec<f64>, RealMatrix) {
    let (r, c) = m.shape();
    let sq = if r < c {
        let mut p = RealMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = svd(&sq);
    let vt = svd.v_t.expect("requested right factor");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let values = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let mut v = RealMatrix::zeros(c, idx.len());
    for (k, &i) in idx.iter().enumerate() {
        v.set_column(k, &vt.row(i).transpose());
    }
    (values, v)
}

/// Singular values in descending order.
pub fn singular_values(m: &RealMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = svd(m).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Largest singular value, zero for empty matrices.
pub fn operator_norm(m: &RealMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Smallest singular value of a tall matrix (columns ≤ rows), zero if rank deficient in shape.
pub fn min_singular_value(m: &RealMatrix) -> f64 {
    if m.ncols() == 0 {
        return f64::INFINITY;
    }
    if m.ncols() > m.nrows() {
        return 0.0;
    }
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// A linear subspace of ℝⁿ stored through an orthonormal basis (columns).
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: RealMatrix,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace {
            basis: RealMatrix::zeros(n, 0),
        }
    }

    pub fn full(n: usize) -> Self {
        Subspace {
            basis: RealMatrix::identity(n, n),
        }
    }

    /// Span of the columns of `m`, with rank decided relative to the largest singular value.
    pub fn span_columns(m: &RealMatrix) -> Self {
        Self::span_columns_tol(m, DEFAULT_KERNEL_TOL)
    }

    pub fn span_columns_tol(m: &RealMatrix, tol: f64) -> Self {
        let n = m.nrows();
        if m.ncols() == 0 {
            return Self::zero(n);
        }
        let svd = svd(m);
        let u = svd.u.expect("requested left factor");
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        if smax == 0.0 {
            return Self::zero(n);
        }
        let cols: Vec<RealVector> = (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] > tol * smax)
            .map(|i| u.column(i).into_owned())
            .collect();
        Self::from_orthonormal(n, &cols)
    }

    pub fn span(n: usize, vectors: &[RealVector]) -> Self {
        if vectors.is_empty() {
            return Self::zero(n);
        }
        Self::span_columns(&RealMatrix::from_columns(vectors))
    }

    fn from_orthonormal(n: usize, cols: &[RealVector]) -> Self {
        if cols.is_empty() {
            Self::zero(n)
        } else {
            Subspace {
                basis: RealMatrix::from_columns(cols),
            }
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_trivial(&self) -> bool {
        self.dim() == 0
    }

    /// Orthonormal basis as columns.
    pub fn basis(&self) -> &RealMatrix {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<RealVector> {
        self.basis.column_iter().map(|c| c.into_owned()).collect()
    }

    pub fn projector(&self) -> RealMatrix {
        &self.basis * self.basis.transpose()
    }

    pub fn project(&self, v: &RealVector) -> RealVector {
        &self.basis * (self.basis.transpose() * v)
    }

    /// Norm of the component of `v` orthogonal to the subspace.
    pub fn residual(&self, v: &RealVector) -> f64 {
        (v - self.project(v)).norm()
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut cols = self.vectors();
        cols.extend(other.vectors());
        Subspace::span(self.ambient_dim(), &cols)
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        let n = self.ambient_dim();
        if self.is_trivial() || other.is_trivial() {
            return Subspace::zero(n);
        }
        let k = self.dim();
        let mut stacked = RealMatrix::zeros(n, k + other.dim());
        stacked.view_mut((0, 0), (n, k)).copy_from(&self.basis);
        stacked
            .view_mut((0, k), (n, other.dim()))
            .copy_from(&(-other.basis.clone()));
        let ker = null_space(&stacked, DEFAULT_KERNEL_TOL);
        let coeffs = ker.basis.rows(0, k).into_owned();
        Subspace::span_columns(&(&self.basis * coeffs))
    }

    pub fn orthogonal_complement(&self) -> Subspace {
        let n = self.ambient_dim();
        if self.is_trivial() {
            return Subspace::full(n);
        }
        null_space(&self.basis.transpose(), DEFAULT_KERNEL_TOL)
    }

    /// Image under a linear map.
    pub fn image(&self, m: &RealMatrix) -> Subspace {
        if self.is_trivial() {
            return Subspace::zero(m.nrows());
        }
        Subspace::span_columns(&(m * &self.basis))
    }

    /// Worst relative residual of `m` applied to the basis, measured outside the subspace.
    pub fn invariance_residual(&self, m: &RealMatrix) -> f64 {
        self.vectors()
            .iter()
            .map(|b| self.residual(&(m * b)))
            .fold(0.0, f64::max)
    }
}

/// Orthonormal basis of the numerical null space of an arbitrary `r × c` matrix.
pub fn null_space(m: &RealMatrix, tol: f64) -> Subspace {
    let c = m.ncols();
    if m.nrows() == 0 {
        return Subspace::full(c);
    }
    let (s, v) = svd_full_right(m);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Subspace::full(c);
    }
    let cols: Vec<RealVector> = (0..c)
        .filter(|&i| s.get(i).is_none_or(|&x| x < tol * smax))
        .map(|i| v.column(i).into_owned())
        .collect();
    Subspace::from_orthonormal(c, &cols)
}

/// Null space of a square matrix: singular values below `tol` times the largest.
pub fn kernel(m: &RealMatrix, tol: f64) -> Subspace {
    null_space(m, tol)
}

/// Null space using an absolute threshold on singular values.
pub fn kernel_abs(m: &RealMatrix, tol: f64) -> Subspace {
    let c = m.ncols();
    let (s, v) = svd_full_right(m);
    let cols: Vec<RealVector> = (0..c)
        .filter(|&i| s.get(i).is_none_or(|&x| x < tol))
        .map(|i| v.column(i).into_owned())
        .collect();
    Subspace::from_orthonormal(c, &cols)
}

/// The `k` right singular vectors with the smallest singular values, plus the
/// gap ratio `σ_{n-k} / σ_max` of the first excluded value (1 when nothing is excluded).
fn smallest_right_vectors(m: &RealMatrix, k: usize) -> (Subspace, f64) {
    let n = m.ncols();
    if k == 0 {
        return (Subspace::zero(n), 1.0);
    }
    if k >= n {
        return (Subspace::full(n), 1.0);
    }
    let (s, v) = svd_full_right(m);
    let cols: Vec<RealVector> = (n - k..n).map(|i| v.column(i).into_owned()).collect();
    let gap = if s[0] > 0.0 { s[n - k - 1] / s[0] } else { 0.0 };
    (Subspace::from_orthonormal(n, &cols), gap)
}

/// Coefficients of det(λI − m), leading coefficient first.
///
/// Uses a Hessenberg reduction followed by the La Budde recurrence, which stays
/// accurate for defective matrices where root expansion does not.
pub fn char_poly(m: &RealMatrix) -> Vec<f64> {
    let n = m.nrows();
    if n == 0 {
        return vec![1.0];
    }
    let h = m.clone().hessenberg().h();
    // p[i] holds the characteristic polynomial of the leading i×i block,
    // coefficients in ascending degree.
    let mut p: Vec<Vec<f64>> = vec![vec![1.0]];
    for i in 0..n {
        let prev = &p[i];
        let mut next = vec![0.0; i + 2];
        for (d, c) in prev.iter().enumerate() {
            next[d + 1] += c;
            next[d] -= h[(i, i)] * c;
        }
        let mut prod = 1.0;
        for mm in 1..=i {
            prod *= h[(i - mm + 1, i - mm)];
            let coef = h[(i - mm, i)] * prod;
            for (d, c) in p[i - mm].iter().enumerate() {
                next[d] -= coef * c;
            }
        }
        p.push(next);
    }
    let mut out = p.pop().expect("nonempty");
    out.reverse();
    out
}

/// Evaluates a polynomial (leading coefficient first) at a square matrix by Horner's rule.
pub fn poly_eval_matrix(coeffs: &[f64], m: &RealMatrix) -> RealMatrix {
    let n = m.nrows();
    let mut acc = RealMatrix::zeros(n, n);
    for &c in coeffs {
        acc = &acc * m + RealMatrix::identity(n, n) * c;
    }
    acc
}

/// Inverse by LU with partial pivoting. nalgebra's `try_inverse` uses cofactor
/// formulas up to 4×4, which lose most digits on matrices with large norm.
pub fn inverse(m: &RealMatrix) -> Option<RealMatrix> {
    let inv = m.clone().lu().try_inverse()?;
    inv.iter().all(|x| x.is_finite()).then_some(inv)
}

pub fn determinant(m: &RealMatrix) -> f64 {
    m.clone().lu().determinant()
}

/// All complex eigenvalues, in the order produced by the real Schur form.
pub fn eigenvalues(m: &RealMatrix) -> Result<Vec<Complex<f64>>> {
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000).ok_or(Error::NoConvergence)?;
    let eig: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().copied().collect();
    if eig.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NoConvergence);
    }
    Ok(eig)
}

fn require_invertible(m: &RealMatrix) -> Result<()> {
    let det = determinant(m);
    if !det.is_finite() || det.abs() < SINGULAR_DET {
        return Err(Error::SingularMatrix(det));
    }
    Ok(())
}

/// Moduli of the eigenvalues grouped with algebraic multiplicity, descending.
///
/// Moduli within a relative `1e-6` of each other are merged, which absorbs the
/// splitting of defective eigenvalues by rounding.
pub fn eigen_moduli(m: &RealMatrix) -> Result<Vec<(f64, usize)>> {
    require_invertible(m)?;
    let mut mods: Vec<f64> = eigenvalues(m)?.iter().map(|z| z.norm()).collect();
    mods.sort_by(|a, b| b.total_cmp(a));
    let mut groups: Vec<(f64, usize, f64)> = Vec::new();
    for r in mods {
        match groups.last_mut() {
            Some((_, count, sum)) if (*sum / *count as f64 - r) <= 1e-6 * r.max(1e-300) => {
                *count += 1;
                *sum += r;
            }
            _ => groups.push((r, 1, r)),
        }
    }
    Ok(groups
        .into_iter()
        .map(|(_, c, s)| (s / c as f64, c))
        .collect())
}

/// The three-way invariant splitting ℝⁿ = A⁺ ⊕ A⁻ ⊕ A⁰ of a matrix.
#[derive(Debug, Clone)]
pub struct SpectralSplit {
    pub a_plus: Subspace,
    pub a_minus: Subspace,
    pub a_zero: Subspace,
    pub alpha: f64,
}

impl SpectralSplit {
    pub fn ambient_dim(&self) -> usize {
        self.a_plus.ambient_dim()
    }

    /// D⁺ = A⁺ ⊕ A⁰.
    pub fn d_plus(&self) -> Subspace {
        self.a_plus.sum(&self.a_zero)
    }

    /// D⁻ = A⁻ ⊕ A⁰.
    pub fn d_minus(&self) -> Subspace {
        self.a_minus.sum(&self.a_zero)
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.a_plus.dim(), self.a_minus.dim(), self.a_zero.dim())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    Plus,
    Minus,
    Zero,
}

/// Real factor `m - λ` or `m² - 2Re(λ)m + |λ|²` for a conjugate pair, scaled to unit size.
fn real_factor(m: &RealMatrix, z: Complex<f64>, scale: f64) -> RealMatrix {
    let n = m.nrows();
    let id = RealMatrix::identity(n, n);
    if z.im == 0.0 {
        (m - &id * z.re) / scale
    } else {
        (m * m - m * (2.0 * z.re) + &id * z.norm_sqr()) / (scale * scale)
    }
}

/// Computes A⁺, A⁻ and A⁰ of `m` relative to the modulus threshold `alpha`.
///
/// Each part is the kernel of the real polynomial built from the eigenvalues in
/// that class, evaluated at `m`. The kernel dimension is the number of roots in
/// the class. Neutral roots are moved onto the circle of radius `alpha` before
/// evaluation, so that rounding in the eigensolver does not blur the kernel.
pub fn spectral_split(m: &RealMatrix, alpha: f64, unit_band: f64) -> Result<SpectralSplit> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimMismatch {
            expected: n,
            found: m.ncols(),
        });
    }
    check_dim(n)?;
    require_invertible(m)?;
    let eig = eigenvalues(m)?;
    let norm = m.norm();
    let band = unit_band.max(ROUNDOFF_FLOOR * f64::EPSILON * norm / alpha);
    // Past this the classes cannot be told apart at working precision.
    if !(band < 0.5) {
        return Err(Error::NoConvergence);
    }

    let mut classes: Vec<(Complex<f64>, Class)> = Vec::with_capacity(n);
    for z in &eig {
        let rel = z.norm() / alpha - 1.0;
        let class = if rel.abs() <= band {
            Class::Zero
        } else if rel.abs() <= AMBIGUITY_GUARD * band {
            return Err(Error::AmbiguousModulus {
                modulus: z.norm(),
                alpha,
            });
        } else if rel > 0.0 {
            Class::Plus
        } else {
            Class::Minus
        };
        classes.push((*z, class));
    }

    let scale = norm.max(alpha).max(1e-300);
    let part = |class: Class| -> Subspace {
        let mut count = 0;
        let mut poly = RealMatrix::identity(n, n);
        for (z, c) in &classes {
            if *c != class || z.im < 0.0 {
                continue;
            }
            let root = if class == Class::Zero {
                z * (alpha / z.norm())
            } else {
                *z
            };
            let root = if root.im.abs() <= 1e-14 * root.norm() || z.im == 0.0 {
                Complex::new(root.re, 0.0)
            } else {
                root
            };
            count += if z.im > 0.0 { 2 } else { 1 };
            poly = real_factor(m, root, scale) * poly;
        }
        smallest_right_vectors(&poly, count).0
    };

    Ok(SpectralSplit {
        a_plus: part(Class::Plus),
        a_minus: part(Class::Minus),
        a_zero: part(Class::Zero),
        alpha,
    })
}

/// [`spectral_split`] with the default threshold 1 and band 1e-9.
pub fn split(m: &RealMatrix) -> Result<SpectralSplit> {
    spectral_split(m, 1.0, DEFAULT_UNIT_BAND)
}

/// Matrix of `m` restricted to an invariant subspace, in its orthonormal basis.
pub fn restrict(m: &RealMatrix, s: &Subspace) -> RealMatrix {
    s.basis().transpose() * m * s.basis()
}

/// Solves `a x = b` in the least-squares sense with minimum norm.
pub fn min_norm_solve(a: &RealMatrix, b: &RealVector) -> RealVector {
    let svd = svd(a);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = DEFAULT_KERNEL_TOL * smax;
    svd.solve(b, eps).expect("factors were computed")
}

pub fn from_rows(rows: &[&[f64]]) -> RealMatrix {
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    RealMatrix::from_fn(r, c, |i, j| rows[i][j])
}

pub fn vector(v: &[f64]) -> RealVector {
    RealVector::from_column_slice(v)
}

/// Block-diagonal direct sum of two square matrices.
pub fn direct_sum(a: &RealMatrix, b: &RealMatrix) -> RealMatrix {
    let (n, k) = (a.nrows(), b.nrows());
    let mut m = RealMatrix::zeros(n + k, n + k);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((n, n), (k, k)).copy_from(b);
    m
}
