//! Numerical toolkit for affine groups acting on ℝⁿ: invariant splittings,
//! projective distances, hyperbolic dynamics, Margulis signs and checkable
//! certificates of non-proper actions.

// `!(x < y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod affine;
pub mod certificates;
pub mod classification;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod metric;
pub mod models;
pub mod sign;

pub use affine::AffineMap;
pub use error::{Error, Result};
