//! Word-metric balls by breadth-first search.

use std::collections::HashMap;

use serde::Serialize;

use super::group::{Element, Group, Letter, Syllable, Word};
use super::BassSerreError;

pub const MAX_RADIUS: usize = 14;
pub const MAX_ELEMENTS: usize = 6_000_000;

/// All elements within `radius` of the identity, with BFS distances and a
/// geodesic back to the identity for each. Elements are numbered in BFS
/// order, which is deterministic because letters are tried in a fixed order.
#[derive(Debug, Clone)]
pub struct CayleyBall {
    pub group: Group,
    pub radius: usize,
    keys: Vec<Box<[i8]>>,
    index: HashMap<Box<[i8]>, u32>,
    dist: Vec<u8>,
    parent: Vec<u32>,
    via: Vec<Letter>,
    /// Number of elements at each distance.
    pub sphere_sizes: Vec<usize>,
}

fn decode(key: &[i8]) -> Element {
    Element {
        center: [key[0] as i32, key[1] as i32],
        syllables: key[2..].chunks(3).map(|c| Syllable { side: c[0] as u8, v: [c[1] as i32, c[2] as i32] }).collect(),
    }
}

/// Total size if each new sphere grows by the latest ratio; the first
/// ratios overshoot, so they are not extrapolated.
fn projected(sizes: &[usize], radius: usize) -> usize {
    let total: usize = sizes.iter().sum();
    let r = sizes.len() - 1;
    if r < 3 || r >= radius {
        return total;
    }
    let growth = sizes[r] as f64 / sizes[r - 1].max(1) as f64;
    let mut last = sizes[r] as f64;
    let mut sum = total as f64;
    for _ in r..radius {
        last *= growth;
        sum += last;
    }
    sum.min(usize::MAX as f64) as usize
}

impl CayleyBall {
    pub fn new(group: &Group, radius: usize) -> Result<Self, BassSerreError> {
        if radius > MAX_RADIUS {
            return Err(BassSerreError::Radius { radius, limit: MAX_RADIUS });
        }
        let letters = group.letters();
        let id = Element::identity();
        let mut ball = Self {
            group: group.clone(),
            radius,
            keys: vec![id.key()],
            index: HashMap::from([(id.key(), 0)]),
            dist: vec![0],
            parent: vec![0],
            via: vec![Letter { gen: 0, inverse: false }],
            sphere_sizes: vec![1],
        };
        let mut frontier = vec![(id, 0u32)];
        for r in 0..radius {
            let p = projected(&ball.sphere_sizes, radius);
            if p > MAX_ELEMENTS {
                return Err(BassSerreError::Size { radius, projected: p, limit: MAX_ELEMENTS });
            }
            let mut next = Vec::new();
            for (g, i) in &frontier {
                for &l in &letters {
                    let mut h = g.clone();
                    h.mul_letter(group, l);
                    let key = h.key();
                    if ball.index.contains_key(&key) {
                        continue;
                    }
                    let j = ball.keys.len() as u32;
                    ball.index.insert(key.clone(), j);
                    ball.keys.push(key);
                    ball.dist.push(r as u8 + 1);
                    ball.parent.push(*i);
                    ball.via.push(l);
                    next.push((h, j));
                }
            }
            ball.sphere_sizes.push(next.len());
            frontier = next;
        }
        Ok(ball)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn index_of(&self, g: &Element) -> Option<usize> {
        self.index.get(&g.key()).map(|&i| i as usize)
    }

    pub fn distance(&self, g: &Element) -> Option<usize> {
        self.index_of(g).map(|i| self.dist[i] as usize)
    }

    pub fn element(&self, i: usize) -> Element {
        decode(&self.keys[i])
    }

    pub fn distance_of(&self, i: usize) -> usize {
        self.dist[i] as usize
    }

    /// The BFS geodesic from the identity to element `i`.
    pub fn geodesic_to(&self, mut i: usize) -> Word {
        let mut w = Vec::with_capacity(self.dist[i] as usize);
        while i != 0 {
            w.push(self.via[i]);
            i = self.parent[i] as usize;
        }
        w.reverse();
        w
    }

    /// Edges `(i, j, letter)` with both ends in the ball and `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize, Letter)> {
        let letters = self.group.letters();
        let mut out = Vec::new();
        for i in 0..self.len() {
            let g = self.element(i);
            for &l in &letters {
                let mut h = g.clone();
                h.mul_letter(&self.group, l);
                if let Some(j) = self.index_of(&h).filter(|&j| j > i) {
                    out.push((i, j, l));
                }
            }
        }
        out
    }

    /// Scans every edge for the projection to the tree.
    pub fn check_projection(&self) -> ProjectionReport {
        let letters = self.group.letters();
        let mut report = ProjectionReport { edges: 0, max_stretch: 0, star_violations: 0 };
        for i in 0..self.len() {
            let g = self.element(i);
            let mut near = vec![g.clone()];
            for &l in &letters {
                let mut h = g.clone();
                h.mul_letter(&self.group, l);
                if self.index_of(&h).is_some_and(|j| j > i) {
                    report.edges += 1;
                    report.max_stretch = report.max_stretch.max(g.tree_distance(&h));
                }
                near.push(h);
            }
            // g projects into the open star of both vertices of its edge;
            // it must lie within 1 of each of those vertex spaces.
            for side in 0..2 {
                let v = g.coset_key(side);
                if !near.iter().any(|x| x.coset_key(side) == v && self.index_of(x).is_some()) {
                    report.star_violations += 1;
                }
            }
        }
        report
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectionReport {
    pub edges: usize,
    /// Largest tree distance across one edge of the ball.
    pub max_stretch: usize,
    pub star_violations: usize,
}

impl ProjectionReport {
    pub fn passed(&self) -> bool {
        self.max_stretch <= 1 && self.star_violations == 0
    }
}

/// Largest diameter of the intersection of the path of `w` with one coset
/// of a vertex group. Along a geodesic the distance between the `i`th and
/// `j`th points is `|j − i|`, so each diameter is an index span.
pub fn vertex_intersection_diameter(w: &[Letter], ball: &CayleyBall) -> Result<usize, BassSerreError> {
    if w.len() > ball.radius {
        return Err(BassSerreError::OutsideBall { length: w.len(), radius: ball.radius });
    }
    let path = ball.group.path(w);
    let end = path.last().expect("path has the identity");
    let i = ball.index_of(end).expect("endpoint lies within the word length");
    if ball.distance_of(i) < w.len() {
        return Err(BassSerreError::NotGeodesic {
            word: ball.group.format_word(w),
            length: w.len(),
            distance: ball.distance_of(i),
            witness: ball.group.format_word(&ball.geodesic_to(i)),
        });
    }
    Ok(coset_spans(&path))
}

pub(crate) fn coset_spans(path: &[Element]) -> usize {
    let mut first: HashMap<Vec<i8>, usize> = HashMap::new();
    let mut d = 0;
    for (k, g) in path.iter().enumerate() {
        for side in 0..2 {
            let f = *first.entry(g.coset_key(side)).or_insert(k);
            d = d.max(k - f);
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::super::group::GraphOfGroupsPreset;
    use super::*;

    #[test]
    fn free_group_ball_sizes() {
        let g = GraphOfGroupsPreset::z_free_z().group().unwrap();
        assert_eq!(CayleyBall::new(&g, 0).unwrap().len(), 1);
        let b = CayleyBall::new(&g, 2).unwrap();
        // Each reduced word extends in three ways.
        assert_eq!(b.len(), 17);
        assert_eq!(b.sphere_sizes, vec![1, 4, 12]);
        assert_eq!(b.edges().len(), 16);
        // The Z² count 1 + 4 + 8 for comparison.
        let z2 = GraphOfGroupsPreset::from_json(r#"{"name":"z2","vertices":[{"generators":["a","b"]},{"generators":[]}],"edges":[{"from":0,"to":1}]}"#).unwrap();
        assert_eq!(CayleyBall::new(&z2.group().unwrap(), 2).unwrap().len(), 13);
    }

    #[test]
    fn geodesics_come_back_from_the_ball() {
        let g = GraphOfGroupsPreset::z2_amalgam_z2().group().unwrap();
        let b = CayleyBall::new(&g, 5).unwrap();
        for i in 0..b.len() {
            let w = b.geodesic_to(i);
            assert_eq!(w.len(), b.distance_of(i));
            assert_eq!(g.evaluate(&w), b.element(i));
        }
    }

    #[test]
    fn non_geodesic_word_gets_a_witness() {
        let g = GraphOfGroupsPreset::z2_free_z2().group().unwrap();
        let b = CayleyBall::new(&g, 4).unwrap();
        let err = vertex_intersection_diameter(&g.parse_word("abAc").unwrap(), &b).unwrap_err();
        match err {
            BassSerreError::NotGeodesic { distance, witness, .. } => {
                assert_eq!(distance, 2);
                assert_eq!(g.evaluate(&g.parse_word(&witness).unwrap()), g.evaluate(&g.parse_word("bc").unwrap()));
            }
            e => panic!("{e}"),
        }
        assert_eq!(vertex_intersection_diameter(&[], &b).unwrap(), 0);
    }

    #[test]
    fn radius_budget() {
        let g = GraphOfGroupsPreset::z_free_z().group().unwrap();
        assert!(matches!(CayleyBall::new(&g, 15), Err(BassSerreError::Radius { .. })));
        let g = GraphOfGroupsPreset::z2_free_z2().group().unwrap();
        assert!(matches!(CayleyBall::new(&g, 14), Err(BassSerreError::Size { .. })));
    }
}
