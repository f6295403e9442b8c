use serde::{Deserialize, Serialize};

use super::words::{collect_words, Word};
use super::{Certificate, GroupSpec};
use crate::affine::AffineMap;
use crate::error::{Error, Result};
use crate::linalg::{self, operator_norm, RealMatrix, RealVector};

/// min over ‖u‖ ≤ r of ‖L u + d‖.
///
/// When the unconstrained minimizer leaves the ball, the constrained one is
/// u(μ) = −(LᵀL + μI)⁻¹Lᵀd with ‖u(μ)‖ = r, found by bisection in log μ.
pub fn ball_image_distance(l: &RealMatrix, d: &RealVector, r: f64) -> f64 {
    let svd = linalg::svd(l);
    let u = svd.u.expect("left factor");
    let s = &svd.singular_values;
    let dt = u.transpose() * d;
    let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let value_at = |coef: &dyn Fn(usize) -> f64| -> f64 {
        // Residual components: (σᵢ cᵢ + 1)·d̃ᵢ with u = Σ cᵢ d̃ᵢ vᵢ.
        (0..s.len())
            .map(|i| ((s[i] * coef(i) + 1.0) * dt[i]).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let unconstrained: f64 = (0..s.len())
        .map(|i| (dt[i] / s[i]).powi(2))
        .sum::<f64>()
        .sqrt();
    if smin > 0.0 && unconstrained <= r {
        return 0.0;
    }
    let norm_u = |mu: f64| -> f64 {
        (0..s.len())
            .map(|i| (s[i] * dt[i] / (s[i] * s[i] + mu)).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let ltd = (0..s.len())
        .map(|i| (s[i] * dt[i]).powi(2))
        .sum::<f64>()
        .sqrt();
    let mut hi = (ltd / r).max(1e-300) * 2.0;
    let mut lo = hi;
    while norm_u(lo) < r && lo > 1e-300 {
        lo *= 1e-4;
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if norm_u(mid) > r {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-15 {
            break;
        }
    }
    value_at(&|i| -s[i] / (s[i] * s[i] + hi))
}

/// Whether γ(K) meets K for the ball K = B(center, r); also returns the image distance.
fn returns(g: &AffineMap, center: &RealVector, r: f64) -> Option<f64> {
    let d = g.apply(center) - center;
    let quick = d.norm() - r * (1.0 + operator_norm(&g.linear));
    if quick > r * 1e-12 {
        return None;
    }
    let dist = ball_image_distance(&g.linear, &d, r);
    (dist <= r).then_some(dist)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanEntry {
    pub word: Word,
    pub word_text: String,
    /// min over x ∈ K of dist(γx, center); at most the radius.
    pub image_distance: f64,
}

/// Return-set table for a ball. Evidence only: an empty table proves nothing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanCert {
    pub generators: Vec<AffineMap>,
    pub center: Vec<f64>,
    pub radius: f64,
    pub max_len: usize,
    pub returns: Vec<ScanEntry>,
    /// Number of returning words of each length 0..=max_len.
    pub counts_by_length: Vec<usize>,
}

impl ScanCert {
    pub fn return_set(&self) -> Vec<&str> {
        self.returns.iter().map(|e| e.word_text.as_str()).collect()
    }
}

fn check_center(spec: &GroupSpec, center: &RealVector, radius: f64) -> Result<()> {
    if center.len() != spec.dim {
        return Err(Error::DimMismatch {
            expected: spec.dim,
            found: center.len(),
        });
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    Ok(())
}

pub fn proper_scan(
    spec: &GroupSpec,
    center: &RealVector,
    radius: f64,
    max_len: usize,
    jobs: usize,
) -> Result<Certificate> {
    check_center(spec, center, radius)?;
    let names = spec.names();
    let hits = collect_words(spec, max_len, jobs, |_, g| returns(g, center, radius))?;
    let mut counts = vec![0; max_len + 1];
    let returns = hits
        .into_iter()
        .map(|(w, dist)| {
            counts[w.len()] += 1;
            ScanEntry {
                word_text: w.display(&names),
                word: w,
                image_distance: dist,
            }
        })
        .collect();
    Ok(Certificate::EvidenceScan(ScanCert {
        generators: spec.generators.clone(),
        center: center.iter().copied().collect(),
        radius,
        max_len,
        returns,
        counts_by_length: counts,
    }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirectionEntry {
    pub direction: Vec<f64>,
    pub word: Word,
    pub word_text: String,
    pub displacement: f64,
}

/// Directions of large displacements seen on the ball K.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirectionSample {
    pub center: Vec<f64>,
    pub radius: f64,
    pub max_len: usize,
    pub directions: Vec<DirectionEntry>,
}

const ANGLE_TOL: f64 = 1e-2;

/// Samples the center and the 2n points center ± r·eᵢ; keeps displacements
/// above 10r, deduplicated by angle in length-lex order.
pub fn direction_set_estimate(
    spec: &GroupSpec,
    center: &RealVector,
    radius: f64,
    max_len: usize,
    jobs: usize,
) -> Result<DirectionSample> {
    check_center(spec, center, radius)?;
    let n = spec.dim;
    let mut samples = vec![center.clone()];
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut x = center.clone();
            x[i] += sign * radius;
            samples.push(x);
        }
    }
    let hits = collect_words(spec, max_len, jobs, |_, g| {
        let found: Vec<(RealVector, f64)> = samples
            .iter()
            .filter_map(|x| {
                let d = g.apply(x) - x;
                let norm = d.norm();
                (norm > 10.0 * radius).then(|| (d / norm, norm))
            })
            .collect();
        (!found.is_empty()).then_some(found)
    })?;
    let names = spec.names();
    let mut directions: Vec<DirectionEntry> = Vec::new();
    for (w, found) in hits {
        for (dir, norm) in found {
            let seen = directions.iter().any(|e| {
                let c: f64 = e.direction.iter().zip(dir.iter()).map(|(a, b)| a * b).sum();
                c.clamp(-1.0, 1.0).acos() < ANGLE_TOL
            });
            if !seen {
                directions.push(DirectionEntry {
                    direction: dir.iter().copied().collect(),
                    word: w.clone(),
                    word_text: w.display(&names),
                    displacement: norm,
                });
            }
        }
    }
    Ok(DirectionSample {
        center: center.iter().copied().collect(),
        radius,
        max_len,
        directions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_rows, vector};

    #[test]
    fn ball_distance_oracle() {
        // Identity: distance is max(0, ‖d‖ − r).
        let id = RealMatrix::identity(3, 3);
        assert_eq!(
            ball_image_distance(&id, &vector(&[0.5, 0.0, 0.0]), 1.0),
            0.0
        );
        assert!((ball_image_distance(&id, &vector(&[3.0, 4.0, 0.0]), 1.0) - 4.0).abs() < 1e-12);
        // Scaling by 2 then by 1/2 along axes.
        let l = from_rows(&[&[2.0, 0.0], &[0.0, 0.5]]);
        let d = vector(&[0.0, 3.0]);
        assert!((ball_image_distance(&l, &d, 1.0) - 2.5).abs() < 1e-9);
        let d = vector(&[5.0, 0.0]);
        assert!((ball_image_distance(&l, &d, 1.0) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn ball_distance_matches_sampling() {
        let l = from_rows(&[&[1.3, 0.4], &[-0.2, 0.7]]);
        let d = vector(&[2.0, -1.5]);
        let exact = ball_image_distance(&l, &d, 0.8);
        let mut best = f64::INFINITY;
        for i in 0..=400 {
            for j in 0..=40 {
                let t = i as f64 / 400.0 * std::f64::consts::TAU;
                let rho = 0.8 * j as f64 / 40.0;
                let u = vector(&[rho * t.cos(), rho * t.sin()]);
                best = best.min((&l * u + &d).norm());
            }
        }
        assert!(exact <= best + 1e-12 && best - exact < 1e-3);
    }
}
