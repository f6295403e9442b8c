#![allow(dead_code)]

use affcert::linalg::{RealMatrix, RealVector};
use affcert::models::{boost_in, rotation};
use affcert::AffineMap;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> RealVector {
    RealVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize) -> RealMatrix {
    RealMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng))
}

/// A random element of the identity component of SO(p, q), as a product of
/// coordinate rotations and boosts.
pub fn random_isometry(rng: &mut ChaCha8Rng, p: usize, q: usize, spread: f64) -> RealMatrix {
    let n = p + q;
    let mut m = RealMatrix::identity(n, n);
    for _ in 0..3 * n {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i == j {
            continue;
        }
        let (i, j) = (i.min(j), i.max(j));
        let t: f64 = rng.random_range(-spread..spread);
        let step = if (i < p) == (j < p) {
            rotation(n, i, j, t * 3.0)
        } else {
            boost_in(n, i, j, t)
        };
        m = step * m;
    }
    m
}

/// An ℝ-regular element of SO(k+1, k): commuting boosts with distinct
/// rapidities, conjugated by a random isometry.
pub fn regular_isometry(rng: &mut ChaCha8Rng, k: usize) -> RealMatrix {
    let n = 2 * k + 1;
    let mut d = RealMatrix::identity(n, n);
    for i in 0..k {
        let t = 0.4 + 0.5 * i as f64 + rng.random_range(0.0..0.3);
        d = boost_in(n, i, k + 1 + i, t) * d;
    }
    let c = random_isometry(rng, k + 1, k, 0.6);
    let ci = c.clone().try_inverse().unwrap();
    c * d * ci
}

pub fn random_affine(rng: &mut ChaCha8Rng, linear: RealMatrix) -> AffineMap {
    let n = linear.nrows();
    AffineMap::new(linear, gaussian_vector(rng, n)).unwrap()
}
