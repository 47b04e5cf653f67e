//! Orbit enumeration of the cusp horoball.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::horoball::Horoball;
use super::preset::GroupPreset;
use super::{sort_parabolics, KleinianError, ParabolicPoint};
use crate::sphere::{self, Point, SphereGrid};

/// Base points closer than this are the same cusp.
pub const DEDUP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnumerationLimits {
    pub max_word_length: usize,
    pub max_points: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        Self { max_word_length: 96, max_points: 4_000_000 }
    }
}

struct Seen {
    grid: SphereGrid,
    points: Vec<Point>,
}

impl Seen {
    fn new() -> Self {
        Self { grid: SphereGrid::new(10.0 * DEDUP_TOL), points: Vec::new() }
    }

    fn insert(&mut self, p: Point) -> bool {
        if self.grid.candidates(&p, DEDUP_TOL).into_iter().any(|i| sphere::chordal(&self.points[i], &p) < DEDUP_TOL) {
            return false;
        }
        self.grid.insert(self.points.len(), &p);
        self.points.push(p);
        true
    }
}

/// Every horoball of the cusp orbit with shadow radius at least `r_min`,
/// found by breadth-first search over images under the generators. The
/// recorded word length is the search depth at which a cusp first appeared.
///
/// The search only follows horoballs with `r ≥ slack · r_min`, so the result
/// is complete when every large shadow is reachable through shadows above
/// that floor; for lattice presets this is checked against the arithmetic
/// enumerator in the tests.
pub fn enumerate_parabolics(preset: &GroupPreset, r_min: f64, limits: EnumerationLimits) -> Result<Vec<ParabolicPoint>, KleinianError> {
    if !(r_min > 0.0 && r_min <= 1.0) {
        return Err(KleinianError::Precondition(format!("r_min must lie in (0, 1], got {r_min}")));
    }
    let letters = preset.letters();
    let floor = r_min * preset.slack;
    let mut seen = Seen::new();
    let mut found = Vec::new();
    let mut frontier = vec![preset.cusp];
    seen.insert(preset.cusp.base.to_sphere());
    found.push(ParabolicPoint::from_horoball(preset.cusp, Some(0)));

    let mut depth = 0;
    while !frontier.is_empty() {
        if depth == limits.max_word_length || found.len() > limits.max_points {
            let floor = frontier.iter().map(Horoball::shadow_radius).fold(0.0, f64::max);
            return Err(KleinianError::IncompleteEnumeration { floor, word_length: depth });
        }
        depth += 1;
        let images: Vec<Horoball> = frontier
            .par_iter()
            .flat_map_iter(|h| letters.iter().map(move |g| h.image(g)))
            .filter(|h| h.shadow_radius() >= floor)
            .collect();
        frontier.clear();
        for h in images {
            if seen.insert(h.base.to_sphere()) {
                found.push(ParabolicPoint::from_horoball(h, Some(depth)));
                frontier.push(h);
            }
        }
    }
    found.retain(|p| p.r >= r_min);
    sort_parabolics(&mut found);
    Ok(found)
}

/// First pair of listed horoballs that overlap, if any.
pub fn check_disjoint(ps: &[ParabolicPoint]) -> Option<(usize, usize)> {
    (0..ps.len())
        .into_par_iter()
        .filter_map(|i| (i + 1..ps.len()).find(|&j| !ps[i].horoball.disjoint(&ps[j].horoball)).map(|j| (i, j)))
        .min()
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::kleinian::mobius::BoundaryPoint;

    #[test]
    fn top_of_psl2_zi() {
        let ps = enumerate_parabolics(&GroupPreset::psl2_zi(), 1.0, EnumerationLimits::default()).unwrap();
        // ∞ and 0 are the only cusps whose horoballs reach the basepoint.
        assert_eq!(ps.len(), 2);
        assert!(ps.iter().all(|p| (p.r - 1.0).abs() < 1e-12));
        assert!(ps.iter().any(|p| p.point == BoundaryPoint::Finite(Complex64::new(0.0, 0.0))));
    }

    #[test]
    fn budget_exhaustion_reports_floor() {
        let limits = EnumerationLimits { max_word_length: 2, max_points: 1 << 20 };
        let err = enumerate_parabolics(&GroupPreset::psl2_zi(), 0.01, limits).unwrap_err();
        match err {
            KleinianError::IncompleteEnumeration { floor, word_length } => {
                assert_eq!(word_length, 2);
                assert!(floor > 0.0 && floor <= 1.0);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn rejects_bad_cutoff() {
        assert!(enumerate_parabolics(&GroupPreset::psl2_zi(), 0.0, EnumerationLimits::default()).is_err());
    }

    #[test]
    fn orbit_is_disjoint() {
        let ps = enumerate_parabolics(&GroupPreset::psl2_zi(), 0.05, EnumerationLimits::default()).unwrap();
        assert_eq!(check_disjoint(&ps), None);
        let mut bad = ps.clone();
        let zero = bad.iter().position(|p| p.point != BoundaryPoint::Infinity).unwrap();
        bad[zero].horoball.size *= 2.0;
        assert!(check_disjoint(&bad).is_some());
    }
}
