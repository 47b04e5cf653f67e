//! Points of the unit sphere, chordal geometry, and a uniform spatial hash.
//!
//! The Riemann sphere `C ∪ {∞}` is identified with the unit sphere by
//! inverse stereographic projection, `∞` going to the north pole.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;

pub type Point = Vector3<f64>;

pub fn north() -> Point {
    Point::new(0.0, 0.0, 1.0)
}

pub fn chordal(a: &Point, b: &Point) -> f64 {
    (a - b).norm()
}

/// Great-circle angle between unit vectors.
pub fn angle(a: &Point, b: &Point) -> f64 {
    2.0 * (chordal(a, b) / 2.0).min(1.0).asin()
}

/// Angular radius of the cap of chordal radius `rho` (`π` once the cap is
/// the whole sphere).
pub fn cap_angle(rho: f64) -> f64 {
    if rho >= 2.0 {
        PI
    } else {
        2.0 * (rho / 2.0).asin()
    }
}

/// Chordal length subtending `theta`.
pub fn chord_of(theta: f64) -> f64 {
    2.0 * (theta.min(PI) / 2.0).sin()
}

/// Whether two open caps are disjoint.
pub fn caps_disjoint(a: &Point, ra: f64, b: &Point, rb: f64) -> bool {
    angle(a, b) >= cap_angle(ra) + cap_angle(rb)
}

pub fn from_complex(z: Complex64) -> Point {
    let n = z.norm_sqr();
    Point::new(2.0 * z.re, 2.0 * z.im, n - 1.0) / (n + 1.0)
}

/// Stereographic coordinate; `None` at the north pole.
pub fn to_complex(p: &Point) -> Option<Complex64> {
    let d = 1.0 - p.z;
    if d <= 1e-300 {
        return None;
    }
    Some(Complex64::new(p.x / d, p.y / d))
}

/// A deterministic orthonormal pair spanning the tangent plane at `c`.
pub fn frame(c: &Point) -> (Point, Point) {
    let helper = if c.x.abs() < 0.9 { Point::x() } else { Point::y() };
    let u = (helper - c * c.dot(&helper)).normalize();
    let v = c.cross(&u);
    (u, v)
}

/// Point at angle `alpha` from `c` in direction `theta` of [`frame`].
pub fn offset(c: &Point, alpha: f64, theta: f64) -> Point {
    let (u, v) = frame(c);
    (c * alpha.cos() + (u * theta.cos() + v * theta.sin()) * alpha.sin()).normalize()
}

/// Closed loop of `n` samples (plus the repeated first) on the circle of
/// chordal radius `rho` about `c`, positively oriented about `c`.
pub fn circle(c: &Point, rho: f64, n: usize) -> Vec<Point> {
    let alpha = cap_angle(rho);
    let mut out: Vec<Point> = (0..n).map(|i| offset(c, alpha, 2.0 * PI * i as f64 / n as f64)).collect();
    out.push(out[0]);
    out
}

/// Spherical linear interpolation.
pub fn slerp(a: &Point, b: &Point, t: f64) -> Point {
    let theta = angle(a, b);
    if theta < 1e-12 {
        return (a + (b - a) * t).normalize();
    }
    let s = theta.sin();
    (a * (((1.0 - t) * theta).sin() / s) + b * ((t * theta).sin() / s)).normalize()
}

/// Geodesic from `a` to `b` with chordal gaps at most `mesh`, excluding `a`
/// and including `b`.
pub fn geodesic_steps(a: &Point, b: &Point, mesh: f64) -> Vec<Point> {
    // Each step spans an angle of at most `mesh`, hence a chord below it.
    let n = (angle(a, b) / mesh).ceil().max(1.0) as usize;
    (1..=n).map(|i| if i == n { *b } else { slerp(a, b, i as f64 / n as f64) }).collect()
}

/// Chordal distance from `p` to the minor great-circle arc `[a, b]`.
pub fn segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let n = a.cross(b);
    let nn = n.norm();
    if nn < 1e-300 {
        return chordal(p, a).min(chordal(p, b));
    }
    let n = n / nn;
    let proj = p - n * p.dot(&n);
    let pn = proj.norm();
    if pn > 1e-300 {
        let q = proj / pn;
        // q lies on the arc iff it is between a and b on the great circle.
        if a.cross(&q).dot(&n) >= 0.0 && q.cross(b).dot(&n) >= 0.0 {
            return chordal(p, &q);
        }
    }
    chordal(p, a).min(chordal(p, b))
}

/// Angle of `p` about `c` in the tangent frame of `c`.
pub fn azimuth(c: &Point, p: &Point) -> f64 {
    let (u, v) = frame(c);
    p.dot(&v).atan2(p.dot(&u))
}

/// Total signed turning of a closed loop about `c`, in radians.
pub fn winding_angle(c: &Point, loop_: &[Point]) -> f64 {
    let mut total = 0.0;
    for w in loop_.windows(2) {
        let mut d = azimuth(c, &w[1]) - azimuth(c, &w[0]);
        while d > PI {
            d -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
        }
        total += d;
    }
    total
}

/// Image of a spherical cap under stereographic projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlaneCap {
    Disk { center: Complex64, radius: f64 },
    /// The cap contains `∞`; it projects to the outside of this disk.
    Exterior { center: Complex64, radius: f64 },
}

/// Projection of the cap of chordal radius `rho` about `c`. `None` when the
/// boundary circle passes through `∞`.
pub fn cap_to_plane(c: &Point, rho: f64) -> Option<PlaneCap> {
    let alpha = cap_angle(rho);
    let n = north();
    let t = n - c * c.dot(&n);
    let t = if t.norm() < 1e-12 { Point::x() } else { t.normalize() };
    let q1 = c * alpha.cos() + t * alpha.sin();
    let q2 = c * alpha.cos() - t * alpha.sin();
    let (z1, z2) = (to_complex(&q1)?, to_complex(&q2)?);
    if chordal(&q1, &n) < 1e-9 || chordal(&q2, &n) < 1e-9 {
        return None;
    }
    let (center, radius) = ((z1 + z2) / 2.0, (z1 - z2).norm() / 2.0);
    Some(if angle(c, &n) < alpha { PlaneCap::Exterior { center, radius } } else { PlaneCap::Disk { center, radius } })
}

/// Uniform hash of points of `R^3` into cubes of side `cell`.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    cell: f64,
    buckets: HashMap<(i64, i64, i64), Vec<usize>>,
}

impl SphereGrid {
    pub fn new(cell: f64) -> Self {
        assert!(cell > 0.0, "grid cell must be positive");
        Self { cell, buckets: HashMap::new() }
    }

    pub fn from_points<'a>(cell: f64, points: impl IntoIterator<Item = &'a Point>) -> Self {
        let mut g = Self::new(cell);
        for (i, p) in points.into_iter().enumerate() {
            g.insert(i, p);
        }
        g
    }

    fn key(&self, p: &Point) -> (i64, i64, i64) {
        ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64, (p.z / self.cell).floor() as i64)
    }

    pub fn insert(&mut self, id: usize, p: &Point) {
        let k = self.key(p);
        self.buckets.entry(k).or_default().push(id);
    }

    /// Ids in every cell meeting the cube of half-side `radius` about `p`.
    /// Callers filter by exact distance.
    pub fn candidates(&self, p: &Point, radius: f64) -> Vec<usize> {
        let r = (radius / self.cell).ceil() as i64;
        let (x, y, z) = self.key(p);
        let mut out = Vec::new();
        for i in -r..=r {
            for j in -r..=r {
                for k in -r..=r {
                    if let Some(ids) = self.buckets.get(&(x + i, y + j, z + k)) {
                        out.extend_from_slice(ids);
                    }
                }
            }
        }
        out
    }
}
