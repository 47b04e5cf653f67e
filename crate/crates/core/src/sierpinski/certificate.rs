//! Exact rational checks of the constants the circle construction relies on.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

/// An inequality `lhs ≤ rhs` between exact rationals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

impl Certificate {
    fn new(name: &str, lhs: BigRational, rhs: BigRational) -> Self {
        Self { name: name.into(), lhs: lhs.to_string(), rhs: rhs.to_string(), holds: lhs <= rhs }
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `factor · Σ_{k≥1} ratio^-k`, in closed form `factor / (ratio − 1)`.
pub fn geometric_tail(factor: i64, ratio: i64) -> BigRational {
    q(factor, ratio - 1)
}

/// `factor · Σ_{k=1}^{n} ratio^-k`.
pub fn geometric_partial(factor: i64, ratio: i64, n: u32) -> BigRational {
    let r = q(1, ratio);
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    for _ in 0..n {
        term *= &r;
        sum += &term;
    }
    sum * BigInt::from(factor)
}

/// The stage followings `5ι_n` add up to at most `λ r_p / 9`.
pub fn drift_certificate(ratio: i64) -> Certificate {
    Certificate::new("drift tail 5·Σ ratio^-k ≤ 1/9", geometric_tail(5, ratio), q(1, 9))
}

/// A stage-`n` cusp kept `ι_n (1 − 1/10)` away from the curve is outside
/// `B(p', 3λ r_p' / 4)`, since `r_p' ≤ 50^-n r_p`.
pub fn avoidance_certificate() -> Certificate {
    Certificate::new("avoidance 3/4 ≤ 1 − 1/10", q(3, 4), BigRational::one() - q(1, 10))
}

/// The annulus keeps a quarter of `λ r_p` on each side of the start circle
/// of radius `λ r_p / 2`, which the drift tail cannot use up.
pub fn annulus_certificate(ratio: i64) -> Certificate {
    Certificate::new("drift tail ≤ 1/4", geometric_tail(5, ratio), q(1, 4))
}

pub fn all_certificates(ratio: i64) -> Vec<Certificate> {
    vec![drift_certificate(ratio), avoidance_certificate(), annulus_certificate(ratio)]
}
