//! Quasi-isometry constants of tree projections of geodesic families.

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::ball::{vertex_intersection_diameter, CayleyBall};
use super::group::{Element, Group, Letter, Word};
use super::BassSerreError;

/// Every geodesic word of length `1..=max_len` from the identity whose
/// coset intersections have diameter at most `d_bound`, in lexicographic
/// letter order. The bound is checked on prefixes, which is exact since
/// extending a path can only grow its intersections.
pub fn geodesic_family(ball: &CayleyBall, max_len: usize, d_bound: usize) -> Vec<Word> {
    struct Search<'a> {
        ball: &'a CayleyBall,
        letters: Vec<Letter>,
        max_len: usize,
        d_bound: usize,
        first: HashMap<Vec<i8>, usize>,
        word: Word,
        out: Vec<Word>,
    }
    impl Search<'_> {
        fn go(&mut self, g: &Element) {
            let k = self.word.len();
            for li in 0..self.letters.len() {
                let l = self.letters[li];
                let mut h = g.clone();
                h.mul_letter(&self.ball.group, l);
                if self.ball.distance(&h) != Some(k + 1) {
                    continue;
                }
                let keys = [h.coset_key(0), h.coset_key(1)];
                if keys.iter().any(|c| self.first.get(c).is_some_and(|&f| k + 1 - f > self.d_bound)) {
                    continue;
                }
                let added: Vec<Vec<i8>> = keys.into_iter().filter(|c| !self.first.contains_key(c)).collect();
                for c in &added {
                    self.first.insert(c.clone(), k + 1);
                }
                self.word.push(l);
                self.out.push(self.word.clone());
                if k + 1 < self.max_len {
                    self.go(&h);
                }
                self.word.pop();
                for c in &added {
                    self.first.remove(c);
                }
            }
        }
    }
    let id = Element::identity();
    let mut s = Search {
        ball,
        letters: sorted_letters(&ball.group),
        max_len: max_len.min(ball.radius),
        d_bound,
        first: HashMap::from([(id.coset_key(0), 0), (id.coset_key(1), 0)]),
        word: Vec::new(),
        out: Vec::new(),
    };
    s.go(&id);
    s.out
}

fn sorted_letters(g: &Group) -> Vec<Letter> {
    let mut l = g.letters();
    l.sort();
    l
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitOptions {
    pub d_bound: usize,
    pub seed: u64,
    /// Family members probed for quasi-geodesic detours.
    pub probe_members: usize,
    /// Detours sampled per probed member.
    pub probe_paths: usize,
}

impl FitOptions {
    pub fn new(d_bound: usize) -> Self {
        Self { d_bound, seed: 0, probe_members: 256, probe_paths: 16 }
    }
}

/// The pair attaining the fitted constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extremal {
    pub word: String,
    pub i: usize,
    pub j: usize,
    pub tree_distance: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasiIsomFit {
    pub preset: String,
    pub radius: usize,
    pub d_bound: usize,
    /// Least `K ≥ 1` with `d/K − K ≤ d_T ≤ K d + K` over every pair of
    /// points on every member.
    pub k: f64,
    pub members: usize,
    pub pairs: usize,
    pub filtered: usize,
    pub extremal: Option<Extremal>,
    /// Largest distance from a sampled `(2, 2)`-quasi-geodesic to the
    /// member it shares endpoints with.
    pub excursion_max: usize,
    pub probes_tried: usize,
    pub probes_accepted: usize,
    pub notices: Vec<String>,
}

const NOTICE_LIMIT: usize = 10;

/// Least `K` accommodating `d_T = t` at word distance `d`.
fn pair_constant(d: usize, t: usize) -> f64 {
    let (d, t) = (d as f64, t as f64);
    let lower = (-t + (t * t + 4.0 * d).sqrt()) / 2.0;
    lower.max(t / (d + 1.0)).max(1.0)
}

/// `(K, i, j, t)` over all pairs of one word.
fn word_constant(group: &Group, w: &[Letter]) -> (f64, usize, usize, usize) {
    let mut best = (1.0, 0, 0, 0);
    let mut e = Element::identity();
    for i in 0..w.len() {
        e.syllables.clear();
        e.center = [0, 0];
        for j in i + 1..=w.len() {
            e.mul_letter(group, w[j - 1]);
            let t = e.syllables.len();
            let k = pair_constant(j - i, t);
            if k > best.0 {
                best = (k, i, j, t);
            }
        }
    }
    best
}

/// Whether `|p_s⁻¹ p_t| ≥ (t − s)/2 − 2` for all `s < t`.
fn is_quasi_geodesic(group: &Group, w: &[Letter]) -> bool {
    (0..w.len()).all(|s| {
        let mut e = Element::identity();
        (s + 1..=w.len()).all(|t| {
            e.mul_letter(group, w[t - 1]);
            2 * e.length() + 4 >= t - s
        })
    })
}

/// Random detours with the endpoints of `sub`: backtracks, swaps of
/// commuting neighbours, and trips `x ⋯ x⁻¹` around a flat.
fn perturb(group: &Group, sub: &[Letter], rng: &mut ChaCha8Rng) -> Word {
    let letters = group.letters();
    let mut w = sub.to_vec();
    for _ in 0..rng.random_range(1..=3) {
        match rng.random_range(0..3) {
            0 => {
                let k = rng.random_range(0..=w.len());
                let x = letters[rng.random_range(0..letters.len())];
                w.splice(k..k, [x, x.inv()]);
            }
            1 => {
                if w.len() >= 2 {
                    let k = rng.random_range(0..w.len() - 1);
                    if group.commute(w[k], w[k + 1]) {
                        w.swap(k, k + 1);
                    }
                }
            }
            _ => {
                let x = letters[rng.random_range(0..letters.len())];
                let k = rng.random_range(0..=w.len());
                let mut end = k;
                while end < w.len() && group.commute(x, w[end]) {
                    end += 1;
                }
                let k2 = rng.random_range(k..=end);
                w.insert(k2, x.inv());
                w.insert(k, x);
            }
        }
    }
    w
}

/// Max over the detour of the distance to the nearest point of `sub`.
fn excursion(group: &Group, sub: &[Letter], detour: &[Letter]) -> usize {
    let base = group.path(sub);
    group
        .path(detour)
        .iter()
        .map(|p| {
            let inv = p.inverse();
            base.iter().map(|g| inv.mul(g).length()).min().unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

/// Fits `K` over the members whose coset intersections stay within the
/// bound; the others are dropped with a notice.
pub fn fit_quasi_geodesic(family: &[Word], ball: &CayleyBall, opts: &FitOptions) -> Result<QuasiIsomFit, BassSerreError> {
    if family.is_empty() {
        return Err(BassSerreError::EmptyFamily);
    }
    let group = &ball.group;
    let diameters: Vec<usize> = family.par_iter().map(|w| vertex_intersection_diameter(w, ball)).collect::<Result<_, _>>()?;
    let kept: Vec<&Word> = family.iter().zip(&diameters).filter(|(_, &d)| d <= opts.d_bound).map(|(w, _)| w).collect();
    let filtered = family.len() - kept.len();
    let mut notices: Vec<String> = family
        .iter()
        .zip(&diameters)
        .filter(|(_, &d)| d > opts.d_bound)
        .take(NOTICE_LIMIT)
        .map(|(w, d)| format!("filtered {}: coset diameter {d} exceeds {}", group.format_word(w), opts.d_bound))
        .collect();
    if filtered > NOTICE_LIMIT {
        notices.push(format!("{} more filtered", filtered - NOTICE_LIMIT));
    }
    if kept.is_empty() {
        return Err(BassSerreError::EmptyFamily);
    }

    let per_word: Vec<(f64, usize, usize, usize)> = kept.par_iter().map(|w| word_constant(group, w)).collect();
    let mut best = (1.0, None);
    for (m, &(k, i, j, t)) in per_word.iter().enumerate() {
        if k > best.0 {
            best = (k, Some(Extremal { word: group.format_word(kept[m]), i, j, tree_distance: t }));
        }
    }
    let pairs = kept.iter().map(|w| w.len() * (w.len() + 1) / 2).sum();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let probed: Vec<usize> = sample(&mut rng, kept.len(), opts.probe_members.min(kept.len())).into_vec();
    let (mut tried, mut accepted, mut excursion_max) = (0, 0, 0);
    for m in probed {
        let w = kept[m];
        for _ in 0..opts.probe_paths {
            let i = rng.random_range(0..w.len());
            let j = rng.random_range(i + 1..=w.len());
            let detour = perturb(group, &w[i..j], &mut rng);
            tried += 1;
            if is_quasi_geodesic(group, &detour) {
                accepted += 1;
                excursion_max = excursion_max.max(excursion(group, &w[i..j], &detour));
            }
        }
    }

    Ok(QuasiIsomFit {
        preset: group.name.clone(),
        radius: ball.radius,
        d_bound: opts.d_bound,
        k: best.0,
        members: kept.len(),
        pairs,
        filtered,
        extremal: best.1,
        excursion_max,
        probes_tried: tried,
        probes_accepted: accepted,
        notices,
    })
}

/// One row per fit: preset, radius, bound, `K`, largest excursion.
pub fn fits_csv(fits: &[QuasiIsomFit]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["preset", "radius", "d_bound", "k", "excursion_max"]).expect("in-memory write");
    for f in fits {
        w.write_record([f.preset.clone(), f.radius.to_string(), f.d_bound.to_string(), f.k.to_string(), f.excursion_max.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

#[cfg(test)]
mod tests {
    use super::super::group::GraphOfGroupsPreset;
    use super::*;

    #[test]
    fn pair_constant_is_least() {
        for d in 1..30 {
            for t in 0..=d {
                let k = pair_constant(d, t);
                let ok = |k: f64| d as f64 / k - k <= t as f64 + 1e-12 && t as f64 <= k * d as f64 + k;
                assert!(ok(k));
                if k > 1.0 {
                    assert!(!ok(k - 1e-9));
                }
            }
        }
    }

    #[test]
    fn alternating_words_are_the_d1_family() {
        let g = GraphOfGroupsPreset::z_free_z().group().unwrap();
        let ball = CayleyBall::new(&g, 4).unwrap();
        let fam = geodesic_family(&ball, 4, 1);
        // 4 choices, then 2 per step: 4 + 8 + 16 + 32.
        assert_eq!(fam.len(), 60);
        assert!(fam.iter().all(|w| w.windows(2).all(|p| p[0].gen != p[1].gen)));
    }

    #[test]
    fn detours_keep_endpoints() {
        let g = GraphOfGroupsPreset::z2_amalgam_z2().group().unwrap();
        let w = g.parse_word("aabdda").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let d = perturb(&g, &w, &mut rng);
            assert_eq!(g.evaluate(&d), g.evaluate(&w));
        }
    }

    #[test]
    fn csv_has_the_report_columns() {
        let g = GraphOfGroupsPreset::z_free_z().group().unwrap();
        let ball = CayleyBall::new(&g, 3).unwrap();
        let fit = fit_quasi_geodesic(&geodesic_family(&ball, 3, 1), &ball, &FitOptions::new(1)).unwrap();
        let csv = fits_csv(&[fit]);
        assert_eq!(csv.lines().next().unwrap(), "preset,radius,d_bound,k,excursion_max");
        assert!(csv.lines().nth(1).unwrap().starts_with("z_free_z,3,1,"));
    }
}
