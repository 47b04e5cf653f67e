use std::fmt;

use serde::Serialize;

use super::arc::SphericalArc;
use super::SierpinskiError;
use crate::sphere::{self, SphereGrid};

/// A monotone, endpoint-preserving map from the samples of the following
/// arc to samples of the followed arc, each sample landing within `iota`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FollowWitness {
    pub iota: f64,
    pub map: Vec<usize>,
    pub max_distance: f64,
}

/// Sample `sample` of the following arc cannot be placed after the image of
/// sample `x`; `distance` is its distance to the rest of the followed arc.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FollowFailure {
    pub x: usize,
    pub y: usize,
    pub sample: usize,
    pub distance: f64,
}

impl fmt::Display for FollowFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sample {} (between {} and {}) is {:.3e} from the remaining arc", self.sample, self.x, self.y, self.distance)
    }
}

const WINDOW: usize = 64;

/// The nearest sample to `x` among the consecutive samples from `j0` on
/// that stay within `iota` of it.
fn nearest_in_run(x: &crate::sphere::Point, ap: &[crate::sphere::Point], j0: usize, iota: f64) -> usize {
    let mut best = (sphere::chordal(x, &ap[j0]), j0);
    for (j, y) in ap.iter().enumerate().skip(j0 + 1) {
        let d = sphere::chordal(x, y);
        if d > iota {
            break;
        }
        if d < best.0 {
            best = (d, j);
        }
    }
    best.1
}

/// Whether `b` ι-follows `a`. Each sample of `b` goes to the nearest sample
/// of `a` in the first run, at or after the previous image, within `iota`
/// of it. Because the
/// map is monotone, this places every sample of `b[x, y]` within `iota` of
/// `a[p(x), p(y)]`.
pub fn iota_follows(b: &SphericalArc, a: &SphericalArc, iota: f64) -> Result<FollowWitness, SierpinskiError> {
    let need = iota / 10.0;
    for arc in [a, b] {
        let mesh = arc.max_gap();
        if mesh > need * (1.0 + 1e-9) {
            return Err(SierpinskiError::Resolution { mesh, required: need });
        }
    }
    let (ap, bp) = (a.points(), b.points());
    let last = ap.len() - 1;
    let mut grid: Option<SphereGrid> = None;
    let mut map = Vec::with_capacity(bp.len());
    let mut worst: f64 = 0.0;
    for (k, x) in bp.iter().enumerate() {
        let from = map.last().copied().unwrap_or(0);
        let fail = |distance: f64| SierpinskiError::Follow(FollowFailure { x: k.saturating_sub(1), y: k, sample: k, distance });
        let pick = if k == 0 {
            (sphere::chordal(x, &ap[0]) <= iota).then_some(0)
        } else if k == bp.len() - 1 {
            (sphere::chordal(x, &ap[last]) <= iota).then_some(last)
        } else {
            (from..(from + WINDOW).min(ap.len()))
                .find(|&j| sphere::chordal(x, &ap[j]) <= iota)
                .or_else(|| {
                    let g = grid.get_or_insert_with(|| SphereGrid::from_points(iota, ap.iter()));
                    g.candidates(x, iota).into_iter().filter(|&j| j >= from && sphere::chordal(x, &ap[j]) <= iota).min()
                })
                .map(|j0| nearest_in_run(x, ap, j0, iota))
        };
        match pick {
            Some(j) => {
                worst = worst.max(sphere::chordal(x, &ap[j]));
                map.push(j);
            }
            None => {
                let rest = &ap[if k + 1 == bp.len() { last } else { from }..];
                return Err(fail(rest.iter().map(|y| sphere::chordal(x, y)).fold(f64::INFINITY, f64::min)));
            }
        }
    }
    Ok(FollowWitness { iota, map, max_distance: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::Point;

    #[test]
    fn an_arc_follows_itself() {
        let a = SphericalArc::geodesic(&Point::x(), &Point::y(), 1e-3);
        let w = iota_follows(&a, &a, 0.01).unwrap();
        assert_eq!(w.map, (0..a.len()).collect::<Vec<_>>());
        assert_eq!(w.max_distance, 0.0);
    }

    #[test]
    fn coarse_arcs_are_rejected() {
        let a = SphericalArc::geodesic(&Point::x(), &Point::y(), 0.1);
        assert!(matches!(iota_follows(&a, &a, 0.01), Err(SierpinskiError::Resolution { .. })));
    }

    #[test]
    fn displaced_arc_fails_with_witness() {
        let iota = 0.01;
        let a = SphericalArc::geodesic(&Point::x(), &Point::y(), 1e-3);
        // Moves both endpoints by chordal 2ι.
        let axis = nalgebra::Unit::new_normalize(Point::new(1.0, 1.0, 0.0));
        let shift = nalgebra::Rotation3::from_axis_angle(&axis, 2.0 * 2f64.sqrt() * iota);
        let b = SphericalArc::new(a.points().iter().map(|p| shift * p).collect()).unwrap();
        match iota_follows(&b, &a, iota) {
            Err(SierpinskiError::Follow(f)) => {
                assert_eq!(f.sample, 0);
                assert!((f.distance - 2.0 * iota).abs() < 1e-5);
            }
            other => panic!("{other:?}"),
        }
    }
}
