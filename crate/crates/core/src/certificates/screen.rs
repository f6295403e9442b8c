use serde::{Deserialize, Serialize};

use super::words::{collect_words, Word};
use super::{Certificate, GroupSpec};
use crate::affine::{fixed_point, AffineMap};
use crate::error::Result;
use crate::linalg::eigenvalues;

/// An element without eigenvalue 1 together with its fixed point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixedPointCert {
    pub word: Word,
    pub word_text: String,
    pub map: AffineMap,
    /// |λᵢ − 1| for every eigenvalue, ascending.
    pub eigen_distances: Vec<f64>,
    pub fixed_point: Vec<f64>,
    pub residual: f64,
}

/// Flags every nontrivial word whose linear part stays at distance > `tol` from 1.
pub fn eigenvalue_one_screen(
    spec: &GroupSpec,
    max_len: usize,
    tol: f64,
    jobs: usize,
) -> Result<Vec<Certificate>> {
    let names = spec.names();
    let hits = collect_words(spec, max_len, jobs, |w, g| {
        if w.is_empty() {
            return None;
        }
        let mut d: Vec<f64> = eigenvalues(&g.linear)
            .ok()?
            .iter()
            .map(|z| (z - 1.0).norm())
            .collect();
        d.sort_by(f64::total_cmp);
        if d[0] <= tol {
            return None;
        }
        let p = fixed_point(g).ok()?;
        let residual = (g.apply(&p) - &p).norm();
        Some((d, p, residual, g.clone()))
    })?;
    Ok(hits
        .into_iter()
        .map(|(w, (d, p, residual, map))| {
            Certificate::FixedPointViolation(FixedPointCert {
                word_text: w.display(&names),
                word: w,
                map,
                eigen_distances: d,
                fixed_point: p.iter().copied().collect(),
                residual,
            })
        })
        .collect())
}
