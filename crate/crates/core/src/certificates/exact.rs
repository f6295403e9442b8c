//! Exact dyadic arithmetic for checking ball memberships without rounding.
//!
//! Every finite `f64` is a dyadic rational, so affine maps with `f64` entries
//! act exactly on dyadic points.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::affine::AffineMap;
use crate::linalg::RealVector;

/// The number m·2^e.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            m: BigInt::zero(),
            e: 0,
        }
    }

    fn normalized(mut m: BigInt, mut e: i64) -> Self {
        if m.is_zero() {
            return Dyadic::zero();
        }
        let tz = m.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            m >>= tz;
            e += tz as i64;
        }
        Dyadic { m, e }
    }

    /// Exact conversion; panics on non-finite input.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite value has no dyadic form");
        if x == 0.0 {
            return Dyadic::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & 0x000f_ffff_ffff_ffff;
        let (mant, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1 << 52), exp - 1075)
        };
        Dyadic::normalized(BigInt::from(mant) * sign, e)
    }

    /// Nearest-ish `f64`: the mantissa is cut to 64 bits first.
    pub fn to_f64(&self) -> f64 {
        if self.m.is_zero() {
            return 0.0;
        }
        let bits = self.m.bits() as i64;
        let shift = (bits - 64).max(0);
        let top = (&self.m >> shift as usize).to_f64().unwrap_or(f64::NAN);
        let exp = self.e + shift;
        let clamped = exp.clamp(-2000, 2000) as i32;
        // Split the scaling so intermediate powers stay finite.
        top * 2f64.powi(clamped / 2) * 2f64.powi(clamped - clamped / 2)
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.m.is_zero() {
            return other.clone();
        }
        if other.m.is_zero() {
            return self.clone();
        }
        let e = self.e.min(other.e);
        let a = &self.m << (self.e - e) as usize;
        let b = &other.m << (other.e - e) as usize;
        Dyadic::normalized(a + b, e)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            m: -self.m.clone(),
            e: self.e,
        }
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::normalized(&self.m * &other.m, self.e + other.e)
    }

    pub fn square(&self) -> Dyadic {
        self.mul(self)
    }

    pub fn cmp_value(&self, other: &Dyadic) -> Ordering {
        let d = self.sub(other);
        if d.m.is_zero() {
            Ordering::Equal
        } else if d.m.is_negative() {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl fmt::Display for Dyadic {
    /// `<mantissa>p<exponent>`, e.g. `3p-2` for 0.75.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}p{}", self.m, self.e)
    }
}

impl FromStr for Dyadic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (m, e) = s
            .split_once('p')
            .ok_or_else(|| format!("missing 'p' in {s:?}"))?;
        let m: BigInt = m.parse().map_err(|_| format!("bad mantissa in {s:?}"))?;
        let e: i64 = e.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        if e.abs() > 1 << 20 {
            return Err(format!("exponent out of range in {s:?}"));
        }
        Ok(Dyadic::normalized(m, e))
    }
}

pub type DyadicVector = Vec<Dyadic>;

/// An affine map with dyadic entries, composed without rounding.
#[derive(Debug, Clone)]
pub struct ExactMap {
    n: usize,
    /// Row-major.
    linear: Vec<Dyadic>,
    translation: Vec<Dyadic>,
}

impl ExactMap {
    pub fn from_map(g: &AffineMap) -> Self {
        let n = g.dim();
        let mut linear = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                linear.push(Dyadic::from_f64(g.linear[(i, j)]));
            }
        }
        ExactMap {
            n,
            linear,
            translation: g.translation.iter().map(|&x| Dyadic::from_f64(x)).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut linear = vec![Dyadic::zero(); n * n];
        for i in 0..n {
            linear[i * n + i] = Dyadic::from_f64(1.0);
        }
        ExactMap {
            n,
            linear,
            translation: vec![Dyadic::zero(); n],
        }
    }

    pub fn apply(&self, x: &[Dyadic]) -> DyadicVector {
        (0..self.n)
            .map(|i| {
                let mut acc = self.translation[i].clone();
                for j in 0..self.n {
                    acc = acc.add(&self.linear[i * self.n + j].mul(&x[j]));
                }
                acc
            })
            .collect()
    }

    /// self ∘ other.
    pub fn compose(&self, other: &ExactMap) -> ExactMap {
        let n = self.n;
        let mut linear = vec![Dyadic::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Dyadic::zero();
                for k in 0..n {
                    acc = acc.add(&self.linear[i * n + k].mul(&other.linear[k * n + j]));
                }
                linear[i * n + j] = acc;
            }
        }
        ExactMap {
            n,
            linear,
            translation: self.apply(&other.translation),
        }
    }

    /// Nearest `f64` approximation.
    pub fn to_map(&self) -> AffineMap {
        let n = self.n;
        let linear =
            crate::linalg::RealMatrix::from_fn(n, n, |i, j| self.linear[i * n + j].to_f64());
        AffineMap {
            linear,
            translation: RealVector::from_iterator(n, self.translation.iter().map(Dyadic::to_f64)),
            name: None,
        }
    }
}

pub fn vector_from_f64(v: &RealVector) -> DyadicVector {
    v.iter().map(|&x| Dyadic::from_f64(x)).collect()
}

pub fn vector_to_f64(v: &[Dyadic]) -> RealVector {
    RealVector::from_iterator(v.len(), v.iter().map(Dyadic::to_f64))
}

pub fn add_vectors(a: &[Dyadic], b: &[Dyadic]) -> DyadicVector {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

pub fn dist_squared(a: &[Dyadic], b: &[Dyadic]) -> Dyadic {
    a.iter()
        .zip(b)
        .fold(Dyadic::zero(), |acc, (x, y)| acc.add(&x.sub(y).square()))
}

/// Whether |a − b|² < r² holds exactly.
pub fn strictly_within(a: &[Dyadic], b: &[Dyadic], r: f64) -> bool {
    let r = Dyadic::from_f64(r);
    dist_squared(a, b).cmp_value(&r.square()) == Ordering::Less
}

/// The map g^n computed exactly, n ≥ 0.
pub fn exact_power(g: &ExactMap, n: u64) -> ExactMap {
    let mut acc = ExactMap::identity(g.n);
    let mut base = g.clone();
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.compose(&base);
        }
        k >>= 1;
        if k > 0 {
            base = base.compose(&base);
        }
    }
    acc
}

/// Rounds x to the nearest multiple of 2^e (ties away from zero), exactly.
pub fn round_to(x: &Dyadic, e: i64) -> Dyadic {
    if x.e >= e {
        return x.clone();
    }
    let shift = (e - x.e) as usize;
    let half = BigInt::one() << (shift - 1);
    let m = if x.m.is_negative() {
        -((-&x.m + &half) >> shift)
    } else {
        (&x.m + &half) >> shift
    };
    Dyadic::normalized(m, e)
}
