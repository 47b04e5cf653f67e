//! Sampled arcs and loops on the unit sphere.

use serde::Serialize;

use super::SierpinskiError;
use crate::sphere::{self, Point, SphereGrid};

/// A polyline of great-circle segments through its samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphericalArc {
    points: Vec<Point>,
}

impl SphericalArc {
    pub fn new(points: Vec<Point>) -> Result<Self, SierpinskiError> {
        if points.len() < 2 {
            return Err(SierpinskiError::Precondition("an arc needs at least two samples".into()));
        }
        if let Some(i) = points.iter().position(|p| !(p.iter().all(|c| c.is_finite()) && (p.norm() - 1.0).abs() < 1e-9)) {
            return Err(SierpinskiError::Precondition(format!("sample {i} is not a unit vector")));
        }
        Ok(Self::from_points(points.into_iter().map(|p| p.normalize()).collect()))
    }

    pub(crate) fn from_points(points: Vec<Point>) -> Self {
        debug_assert!(points.len() >= 2);
        Self { points }
    }

    /// Great-circle arc from `a` to `b` with gaps at most `mesh`.
    pub fn geodesic(a: &Point, b: &Point, mesh: f64) -> Self {
        let mut points = vec![*a];
        points.extend(sphere::geodesic_steps(a, b, mesh));
        Self { points }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> &Point {
        &self.points[0]
    }

    pub fn end(&self) -> &Point {
        &self.points[self.points.len() - 1]
    }

    pub fn max_gap(&self) -> f64 {
        max_gap(&self.points)
    }

    /// Subdivides every segment longer than `mesh`; the curve is unchanged.
    pub fn refined(&self, mesh: f64) -> Self {
        Self { points: refine(&self.points, mesh) }
    }

    pub fn reversed(&self) -> Self {
        Self { points: self.points.iter().rev().copied().collect() }
    }

    /// Cumulative chordal length at each sample.
    pub fn prefix_lengths(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.points.len());
        let mut acc = 0.0;
        out.push(0.0);
        for w in self.points.windows(2) {
            acc += sphere::chordal(&w[0], &w[1]);
            out.push(acc);
        }
        out
    }

    /// Distance from `x` to the polyline.
    pub fn distance_to(&self, x: &Point) -> f64 {
        self.points.windows(2).map(|w| sphere::segment_distance(x, &w[0], &w[1])).fold(f64::INFINITY, f64::min)
    }

    /// A pair of non-adjacent segments closer than `tol` or crossing.
    pub fn self_intersection(&self, tol: f64) -> Option<(usize, usize)> {
        polyline_self_intersection(&self.points, false, tol)
    }

    /// Largest distance from a sample of either arc to the other arc.
    pub fn hausdorff(&self, other: &SphericalArc) -> f64 {
        let one = |a: &SphericalArc, b: &SphericalArc| {
            let grid = segment_grid(&b.points, b.max_gap());
            a.points.iter().map(|x| nearest_segment(&b.points, &grid, b.max_gap(), x)).fold(0.0, f64::max)
        };
        one(self, other).max(one(other, self))
    }
}

pub(crate) fn max_gap(points: &[Point]) -> f64 {
    points.windows(2).map(|w| sphere::chordal(&w[0], &w[1])).fold(0.0, f64::max)
}

pub(crate) fn refine(points: &[Point], mesh: f64) -> Vec<Point> {
    let mut out = Vec::with_capacity(points.len());
    out.push(points[0]);
    for w in points.windows(2) {
        if sphere::chordal(&w[0], &w[1]) <= mesh {
            out.push(w[1]);
        } else {
            out.extend(sphere::geodesic_steps(&w[0], &w[1], mesh));
        }
    }
    out
}

/// Segments hashed at their midpoints; cells are at least as large as
/// every segment.
pub(crate) fn segment_grid(points: &[Point], cell: f64) -> SphereGrid {
    let mut g = SphereGrid::new(cell.max(1e-15));
    for (i, w) in points.windows(2).enumerate() {
        g.insert(i, &((w[0] + w[1]) * 0.5));
    }
    g
}

/// Distance from `x` to the polyline, exact when it is below `cell`.
pub(crate) fn nearest_segment(points: &[Point], grid: &SphereGrid, cell: f64, x: &Point) -> f64 {
    let near = grid.candidates(x, 2.0 * cell);
    if near.is_empty() {
        return points.windows(2).map(|w| sphere::segment_distance(x, &w[0], &w[1])).fold(f64::INFINITY, f64::min);
    }
    near.into_iter().map(|i| sphere::segment_distance(x, &points[i], &points[i + 1])).fold(f64::INFINITY, f64::min)
}

/// Whether the short great-circle segments `[a, b]` and `[c, d]` cross.
pub(crate) fn segments_cross(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    // Differences keep the sign tests accurate for segments far shorter
    // than the coordinates' rounding scale allows with plain products.
    let n1 = a.cross(&(b - a));
    let n2 = c.cross(&(d - c));
    let (sc, sd) = ((c - a).dot(&n1), (d - a).dot(&n1));
    let (sa, sb) = ((a - c).dot(&n2), (b - c).dot(&n2));
    sc * sd < 0.0 && sa * sb < 0.0 && (a + b).dot(&(c + d)) > 0.0
}

fn segment_gap(a: &Point, b: &Point, c: &Point, d: &Point) -> f64 {
    if segments_cross(a, b, c, d) {
        return 0.0;
    }
    sphere::segment_distance(a, c, d)
        .min(sphere::segment_distance(b, c, d))
        .min(sphere::segment_distance(c, a, b))
        .min(sphere::segment_distance(d, a, b))
}

/// Segment-pair scan for a polyline, or a loop when `closed` (the last
/// sample then repeats the first).
pub(crate) fn polyline_self_intersection(points: &[Point], closed: bool, tol: f64) -> Option<(usize, usize)> {
    let n = points.len().saturating_sub(1);
    let cell = max_gap(points) + tol;
    let grid = segment_grid(points, cell);
    let adjacent = |i: usize, j: usize| j == i + 1 || (closed && i == 0 && j + 1 == n);
    let mut best: Option<(usize, usize)> = None;
    for i in 0..n {
        let mid = (points[i] + points[i + 1]) * 0.5;
        for j in grid.candidates(&mid, cell) {
            if j <= i || adjacent(i, j) {
                continue;
            }
            if segment_gap(&points[i], &points[i + 1], &points[j], &points[j + 1]) < tol {
                best = Some(best.map_or((i, j), |b| b.min((i, j))));
            }
        }
    }
    best
}

/// A closed sampled loop around a reference point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphericalCircle {
    points: Vec<Point>,
    center: Point,
}

impl SphericalCircle {
    pub fn new(points: Vec<Point>, center: Point) -> Result<Self, SierpinskiError> {
        if points.len() < 4 || points[0] != points[points.len() - 1] {
            return Err(SierpinskiError::Precondition("a loop needs at least three samples and must repeat its first".into()));
        }
        let c = Self { points, center };
        if c.min_radius() <= 0.0 {
            return Err(SierpinskiError::Precondition("loop passes through its reference point".into()));
        }
        Ok(c)
    }

    /// The round circle of chordal radius `rho` about `center`.
    pub fn round(center: &Point, rho: f64, mesh: f64) -> Self {
        let n = ((std::f64::consts::PI * 2.0 * rho / mesh).ceil() as usize).max(8);
        Self { points: sphere::circle(center, rho, n), center: *center }
    }

    /// `j` followed by `j2`, which must run from the end of `j` back to its
    /// start.
    pub fn from_arcs(j: &SphericalArc, j2: &SphericalArc, center: Point) -> Result<Self, SierpinskiError> {
        if j.end() != j2.start() || j2.end() != j.start() {
            return Err(SierpinskiError::Precondition("arcs do not share their endpoints".into()));
        }
        let mut points = j.points().to_vec();
        points.extend_from_slice(&j2.points()[1..]);
        Self::new(points, center)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn max_gap(&self) -> f64 {
        max_gap(&self.points)
    }

    /// Total turning about the centre.
    pub fn winding_angle(&self) -> f64 {
        sphere::winding_angle(&self.center, &self.points)
    }

    /// Turning about an arbitrary point off the loop, in whole turns. It is
    /// nonzero exactly when the loop separates `x` from its antipode.
    pub fn winding_number_about(&self, x: &Point) -> i64 {
        (sphere::winding_angle(x, &self.points) / std::f64::consts::TAU).round() as i64
    }

    /// Least distance from the centre to the polyline.
    pub fn min_radius(&self) -> f64 {
        self.distance_to(&self.center)
    }

    /// Largest distance from the centre to a sample; geodesic segments bulge
    /// inward, so this is also the largest over the polyline.
    pub fn max_radius(&self) -> f64 {
        self.points.iter().map(|p| sphere::chordal(p, &self.center)).fold(0.0, f64::max)
    }

    pub fn distance_to(&self, x: &Point) -> f64 {
        self.points.windows(2).map(|w| sphere::segment_distance(x, &w[0], &w[1])).fold(f64::INFINITY, f64::min)
    }

    pub fn self_intersection(&self, tol: f64) -> Option<(usize, usize)> {
        polyline_self_intersection(&self.points, true, tol)
    }

    /// At most `max` samples, evenly strided, still closed.
    pub fn decimated(&self, max: usize) -> Vec<Point> {
        let n = self.points.len() - 1;
        let stride = n.div_ceil(max.max(3));
        let mut out: Vec<Point> = self.points[..n].iter().step_by(stride.max(1)).copied().collect();
        out.push(out[0]);
        out
    }

    /// Diameter of the sample set, from at most `max` evenly strided
    /// samples; low by at most the stride's arc length.
    pub fn diameter(&self, max: usize) -> f64 {
        let pts = self.decimated(max);
        let mut d: f64 = 0.0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                d = d.max(sphere::chordal(&pts[i], &pts[j]));
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refinement_preserves_samples_and_bounds_gaps() {
        let a = SphericalArc::new(vec![Point::x(), Point::y(), Point::z()]).unwrap();
        let r = a.refined(0.01);
        assert!(r.max_gap() <= 0.01 + 1e-15);
        assert_eq!(r.start(), a.start());
        assert_eq!(r.end(), a.end());
        assert!(r.points().contains(&Point::y()));
        assert!(a.hausdorff(&r) < 1e-12);
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(SphericalArc::new(vec![Point::x()]).is_err());
        assert!(SphericalArc::new(vec![Point::x(), Point::new(2.0, 0.0, 0.0)]).is_err());
    }

    #[test]
    fn crossing_detected() {
        let c = Point::z();
        let pts = vec![
            sphere::offset(&c, 0.1, 0.0),
            sphere::offset(&c, 0.1, 2.0),
            sphere::offset(&c, 0.1, 1.0),
            sphere::offset(&c, 0.1, 4.0),
        ];
        let arc = SphericalArc::new(pts).unwrap();
        assert_eq!(arc.self_intersection(1e-12), Some((0, 2)));
        let round = SphericalCircle::round(&c, 0.1, 0.001);
        assert_eq!(round.self_intersection(1e-9), None);
    }

    #[test]
    fn round_circle_geometry() {
        let c = sphere::from_complex(num_complex::Complex64::new(0.2, 0.1));
        let round = SphericalCircle::round(&c, 0.05, 0.0005);
        assert!((round.winding_angle() - std::f64::consts::TAU).abs() < 1e-9);
        assert!((round.max_radius() - 0.05).abs() < 1e-12);
        assert!(round.min_radius() > 0.05 - 1e-6);
        assert_eq!(round.winding_number_about(&c), 1);
        assert_eq!(round.winding_number_about(&sphere::offset(&c, 0.5, 0.0)), 0);
        assert_eq!(round.winding_number_about(&-c).abs(), 1);
        assert!((round.diameter(2000) - 0.1).abs() < 1e-4);
    }
}
