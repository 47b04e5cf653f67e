//! Horoballs in the upper half-space model and their trace in the ball model.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mobius::{BoundaryPoint, MobiusMap};
use super::KleinianError;
use crate::sphere::{self, Point};

/// The basepoint `(0, 0, 1)`, the origin of the ball model.
pub const BASEPOINT: (Complex64, f64) = (Complex64::new(0.0, 0.0), 1.0);

/// A horoball based at `base`. `size` is the Euclidean diameter for a finite
/// base and the height of the bounding horosphere for `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horoball {
    pub base: BoundaryPoint,
    pub size: f64,
}

impl Horoball {
    pub fn new(base: BoundaryPoint, size: f64) -> Result<Self, KleinianError> {
        if !(size > 0.0 && size.is_finite()) {
            return Err(KleinianError::Degenerate(format!("horoball size must be positive, got {size}")));
        }
        Ok(Self { base, size })
    }

    /// Image under a Möbius map. Diameters scale by `|g'(p)| = |cp + d|^-2`.
    pub fn image(&self, g: &MobiusMap) -> Horoball {
        let base = g.apply(self.base);
        let size = match (self.base, base) {
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => self.size * g.a.norm_sqr(),
            (BoundaryPoint::Infinity, BoundaryPoint::Finite(_)) => 1.0 / (self.size * g.c.norm_sqr()),
            (BoundaryPoint::Finite(_), BoundaryPoint::Infinity) => 1.0 / (self.size * g.c.norm_sqr()),
            (BoundaryPoint::Finite(p), BoundaryPoint::Finite(_)) => self.size / (g.c * p + g.d).norm_sqr(),
        };
        Horoball { base, size }
    }

    /// Signed hyperbolic distance from `(z, t)` to the bounding horosphere,
    /// negative inside.
    pub fn signed_distance(&self, z: Complex64, t: f64) -> f64 {
        match self.base {
            BoundaryPoint::Infinity => (self.size / t).ln(),
            BoundaryPoint::Finite(p) => (((z - p).norm_sqr() + t * t) / (t * self.size)).ln(),
        }
    }

    /// Hyperbolic distance from `(z, t)`, zero inside.
    pub fn distance(&self, z: Complex64, t: f64) -> Result<f64, KleinianError> {
        if !(t > 0.0) {
            return Err(KleinianError::Precondition(format!("point must lie in the upper half-space, t = {t}")));
        }
        Ok(self.signed_distance(z, t).max(0.0))
    }

    /// `exp(−d(x0, H))` at the standard basepoint.
    pub fn shadow_radius(&self) -> f64 {
        (-self.signed_distance(BASEPOINT.0, BASEPOINT.1).max(0.0)).exp()
    }

    /// Euclidean radius of this horoball in the ball model, where it is a
    /// ball tangent to the sphere at [`base`](Self::base).
    pub fn ball_radius(&self) -> f64 {
        let r = (-self.signed_distance(BASEPOINT.0, BASEPOINT.1)).exp();
        r / (1.0 + r)
    }

    /// Whether two open horoballs are disjoint, up to relative error 1e-9 so
    /// that tangent pairs pass.
    pub fn disjoint(&self, other: &Horoball) -> bool {
        match (self.base, other.base) {
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => false,
            (BoundaryPoint::Infinity, BoundaryPoint::Finite(_)) => other.size <= self.size * (1.0 + 1e-9),
            (BoundaryPoint::Finite(_), BoundaryPoint::Infinity) => self.size <= other.size * (1.0 + 1e-9),
            (BoundaryPoint::Finite(p), BoundaryPoint::Finite(q)) => (p - q).norm_sqr() >= self.size * other.size * (1.0 - 1e-9),
        }
    }
}

/// Hyperbolic length of the radial ray from the ball-model origin toward
/// the unit vector `x` inside the horoball `h`; infinite when `x` is the
/// base of `h`.
pub fn penetration_diameter(x: &Point, h: &Horoball) -> f64 {
    let p = h.base.to_sphere();
    let rho = h.ball_radius();
    let cos = x.dot(&p).clamp(-1.0, 1.0);
    let b = (1.0 - rho) * cos;
    let disc = b * b - (1.0 - 2.0 * rho);
    if disc <= 0.0 {
        return 0.0;
    }
    let (s1, s2) = (b - disc.sqrt(), b + disc.sqrt());
    if s2 <= 0.0 {
        return 0.0;
    }
    if s2 >= 1.0 - 1e-15 || sphere::chordal(x, &p) < 1e-15 {
        return f64::INFINITY;
    }
    2.0 * (s2.atanh() - s1.max(0.0).atanh())
}

/// Empirical constants relating penetration depth and shadow membership
/// for one horoball.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdFit {
    pub lambda: f64,
    /// Largest sampled penetration among rays ending outside `B(p, λ r_p)`.
    pub c_of_lambda: f64,
    /// Smallest sampled `d(x, p)/r_p` among rays with penetration at most
    /// `c_of_lambda`.
    pub lambda_of_c: f64,
}

/// Samples `rays` boundary points at chordal distances spread over `(0, 2]`
/// from the base of `h` and fits the two thresholds for each `λ`.
pub fn fit_thresholds(h: &Horoball, lambdas: &[f64], rays: usize) -> Vec<ThresholdFit> {
    let p = h.base.to_sphere();
    let r = h.shadow_radius();
    let samples: Vec<(f64, f64)> = (1..=rays)
        .map(|i| {
            // Geometric spacing resolves both the deep and the shallow regime.
            let d = 2.0 * (1e-6f64).powf(1.0 - i as f64 / rays as f64);
            let theta = i as f64 * 2.399963229728653;
            let x = sphere::offset(&p, sphere::cap_angle(d), theta);
            (sphere::chordal(&x, &p), penetration_diameter(&x, h))
        })
        .collect();
    lambdas
        .iter()
        .map(|&lambda| {
            let c = samples.iter().filter(|(d, _)| *d >= lambda * r).map(|s| s.1).fold(0.0, f64::max);
            let l = samples.iter().filter(|(_, pen)| *pen <= c).map(|(d, _)| d / r).fold(f64::INFINITY, f64::min);
            ThresholdFit { lambda, c_of_lambda: c, lambda_of_c: l }
        })
        .collect()
}
