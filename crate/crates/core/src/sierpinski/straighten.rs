//! Removal of quasi-arc violations by geodesic shortcuts.

use serde::Serialize;

use super::arc::SphericalArc;
use super::follow::{iota_follows, FollowWitness};
use super::params::QuasiArcParams;
use super::SierpinskiError;
use crate::sphere::{self, Point, SphereGrid};

/// Samples `i < j` at distance below `s ι` whose subarc has diameter at
/// least `S ι`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
}

const MAX_ROUNDS: usize = 200;

/// Whether the samples `pts[i..=j]` span at least `bound`.
fn diameter_reaches(pts: &[Point], bound: f64) -> bool {
    let far = pts.iter().map(|p| sphere::chordal(&pts[0], p)).fold(0.0, f64::max);
    if far >= bound {
        return true;
    }
    if 2.0 * far < bound {
        return false;
    }
    (0..pts.len()).any(|a| (a + 1..pts.len()).any(|b| sphere::chordal(&pts[a], &pts[b]) >= bound))
}

/// Every sample pair breaking the quasi-arc condition at scale `iota`.
/// Pairs closer than `s ι` come from a spatial hash; pairs joined by a path
/// shorter than `S ι` are cleared by their arc length alone.
pub fn quasi_arc_violations(arc: &SphericalArc, iota: f64, params: &QuasiArcParams) -> Vec<Violation> {
    let pts = arc.points();
    let near = params.s * iota;
    let far = params.big_s * iota;
    let lengths = arc.prefix_lengths();
    let grid = SphereGrid::from_points(near, pts.iter());
    let mut out = Vec::new();
    for (i, x) in pts.iter().enumerate() {
        for j in grid.candidates(x, near) {
            if j <= i + 1 || lengths[j] - lengths[i] < far {
                continue;
            }
            let d = sphere::chordal(x, &pts[j]);
            if d < near && diameter_reaches(&pts[i..=j], far) {
                out.push(Violation { i, j, distance: d });
            }
        }
    }
    out.sort_by(|a, b| a.distance.total_cmp(&b.distance).then(a.i.cmp(&b.i)).then(a.j.cmp(&b.j)));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Straightened {
    pub arc: SphericalArc,
    pub shortcuts: usize,
    pub rounds: usize,
    pub witness: FollowWitness,
}

/// Shortcuts violations closest first until none remain, then certifies
/// that the result ι-follows the input. Each round takes the closest
/// violation and every later one whose index range misses those already
/// taken.
pub fn straighten(a: &SphericalArc, iota: f64, params: &QuasiArcParams) -> Result<Straightened, SierpinskiError> {
    params.validate()?;
    let mesh = iota / 10.0;
    if a.max_gap() > mesh * (1.0 + 1e-9) {
        return Err(SierpinskiError::Resolution { mesh: a.max_gap(), required: mesh });
    }
    let mut arc = a.clone();
    let mut shortcuts = 0;
    let mut rounds = 0;
    loop {
        let found = quasi_arc_violations(&arc, iota, params);
        if found.is_empty() {
            break;
        }
        if rounds == MAX_ROUNDS {
            return Err(SierpinskiError::Budget { iterations: rounds, violations: found.len() });
        }
        rounds += 1;
        let mut taken: Vec<Violation> = Vec::new();
        for v in found {
            if taken.iter().all(|t| v.j < t.i || v.i > t.j) {
                taken.push(v);
            }
        }
        taken.sort_by_key(|v| v.i);
        let old = arc.into_points();
        let mut pts = Vec::with_capacity(old.len());
        let mut next = 0;
        for v in &taken {
            pts.extend_from_slice(&old[next..=v.i]);
            pts.extend(sphere::geodesic_steps(&old[v.i], &old[v.j], mesh));
            next = v.j + 1;
        }
        pts.extend_from_slice(&old[next..]);
        shortcuts += taken.len();
        arc = SphericalArc::from_points(pts);
    }
    let witness = iota_follows(&arc, a, iota)?;
    Ok(Straightened { arc, shortcuts, rounds, witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_geodesic_is_unchanged() {
        let iota = 0.01;
        let a = SphericalArc::geodesic(&Point::x(), &sphere::offset(&Point::x(), 0.004, 1.0), iota / 10.0);
        let out = straighten(&a, iota, &QuasiArcParams::default()).unwrap();
        assert_eq!(out.arc, a);
        assert_eq!(out.shortcuts, 0);
    }

    #[test]
    fn loop_is_cut() {
        let iota = 0.001;
        let mesh = iota / 10.0;
        let p = Point::x();
        let q = sphere::offset(&p, 0.5 * iota * 0.25, 0.0);
        // Out-and-back excursion of diameter 10ι between two close samples.
        let tip = sphere::offset(&p, 10.0 * iota, 1.5);
        let mut pts = SphericalArc::geodesic(&sphere::offset(&p, 0.02, 3.14), &p, mesh).into_points();
        pts.extend(sphere::geodesic_steps(&p, &tip, mesh));
        pts.extend(sphere::geodesic_steps(&tip, &q, mesh));
        pts.extend(sphere::geodesic_steps(&q, &sphere::offset(&p, 0.02, 0.0), mesh));
        let a = SphericalArc::new(pts).unwrap();
        let params = QuasiArcParams::default();
        assert!(!quasi_arc_violations(&a, iota, &params).is_empty());
        let out = straighten(&a, iota, &params).unwrap();
        assert!(quasi_arc_violations(&out.arc, iota, &params).is_empty());
        assert!(out.shortcuts >= 1);
        assert!(out.arc.len() < a.len());
        let again = straighten(&out.arc, iota, &params).unwrap();
        assert_eq!(again.arc, out.arc);
    }
}
