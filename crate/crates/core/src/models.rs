//! Standard matrices in the coordinates (v₁..v_p, w₁..w_q) of a signature (p,q) form.

use crate::linalg::RealMatrix;

/// Boost in the (v₁, w₁) plane of ℝ³ with eigenvalues λ, 1, 1/λ.
pub fn boost_eigen(lambda: f64) -> RealMatrix {
    let c = (lambda + 1.0 / lambda) / 2.0;
    let s = (lambda - 1.0 / lambda) / 2.0;
    let mut m = RealMatrix::identity(3, 3);
    m[(0, 0)] = c;
    m[(2, 2)] = c;
    m[(0, 2)] = s;
    m[(2, 0)] = s;
    m
}

/// Boost with rapidity `t` in the (v₁, w₁) plane of ℝ³.
pub fn boost(t: f64) -> RealMatrix {
    boost_eigen(t.exp())
}

/// Rotation by `theta` in the (v₁, v₂) plane of ℝ³; preserves the (2,1) form.
pub fn rotation_xy(theta: f64) -> RealMatrix {
    rotation(3, 0, 1, theta)
}

/// Rotation by `theta` in the coordinate plane (i, j) of ℝⁿ.
pub fn rotation(n: usize, i: usize, j: usize, theta: f64) -> RealMatrix {
    let (s, c) = theta.sin_cos();
    let mut m = RealMatrix::identity(n, n);
    m[(i, i)] = c;
    m[(j, j)] = c;
    m[(i, j)] = -s;
    m[(j, i)] = s;
    m
}

/// Boost with rapidity `t` mixing a positive coordinate `i` with a negative coordinate `j`.
pub fn boost_in(n: usize, i: usize, j: usize, t: f64) -> RealMatrix {
    let (c, s) = (t.cosh(), t.sinh());
    let mut m = RealMatrix::identity(n, n);
    m[(i, i)] = c;
    m[(j, j)] = c;
    m[(i, j)] = s;
    m[(j, i)] = s;
    m
}
