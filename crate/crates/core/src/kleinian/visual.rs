//! Visual metric from the ball-model origin, by direct evaluation of the
//! Gromov product along truncated rays.

use serde::Serialize;

use super::KleinianError;
use crate::sphere::{self, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VisualReport {
    pub gromov_product: f64,
    pub visual: f64,
    pub chordal: f64,
    /// `visual / chordal`.
    pub ratio: f64,
}

/// `(a|b)_0` for the points at hyperbolic distance `t` along the rays from
/// the origin toward `x` and `y`.
fn truncated_product(x: &Point, y: &Point, t: f64) -> f64 {
    let s = (t / 2.0).tanh();
    let ch = (t / 2.0).cosh();
    // cosh d(a, b) = 1 + 2|a − b|² / ((1 − |a|²)(1 − |b|²)), 1 − s² = sech²(t/2).
    let z = 1.0 + 2.0 * s * s * (x - y).norm_squared() * ch.powi(4);
    let d = (z + (z * z - 1.0).sqrt()).ln();
    (2.0 * t - d) / 2.0
}

/// Gromov product of two distinct boundary points, extrapolated by running
/// the rays out until successive values agree to 1e-12.
pub fn visual_vs_chordal(x: &Point, y: &Point) -> Result<VisualReport, KleinianError> {
    let chordal = sphere::chordal(x, y);
    if chordal < 1e-12 {
        return Err(KleinianError::Precondition("boundary points must differ".into()));
    }
    let mut t = 8.0;
    let mut g = truncated_product(x, y, t);
    loop {
        t *= 1.5;
        let next = truncated_product(x, y, t);
        let done = (next - g).abs() < 1e-12 || t > 60.0;
        g = next;
        if done {
            break;
        }
    }
    let visual = (-g).exp();
    Ok(VisualReport { gromov_product: g, visual, chordal, ratio: visual / chordal })
}
