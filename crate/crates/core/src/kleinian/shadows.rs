//! Shadows `B(p, λ r_p)` of the cusp horoballs and their complement.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::{sort_parabolics, KleinianError, ParabolicPoint};
use crate::sphere::{self, PlaneCap, Point, SphereGrid};

/// Pairs whose radii differ by more than this factor are not compared.
pub const SEPARATION_RATIO: f64 = 100.0;

/// Bands spanning the ratio `100 < 2^7`.
const COMPARABLE_BANDS: usize = 7;

/// Shadow radii banded dyadically, each band hashed at twice its largest
/// shadow radius so that every query touches a bounded number of cells per band.
#[derive(Debug, Clone)]
pub struct ShadowIndex {
    lambda: f64,
    centers: Vec<Point>,
    radii: Vec<f64>,
    bands: Vec<(usize, SphereGrid)>,
}

fn band_of(r: f64) -> usize {
    (-r.log2()).floor().max(0.0) as usize
}

fn band_top(k: usize) -> f64 {
    0.5f64.powi(k as i32)
}

impl ShadowIndex {
    pub fn new(ps: &[ParabolicPoint], lambda: f64) -> Self {
        let mut bands: Vec<(usize, SphereGrid)> = Vec::new();
        for (i, p) in ps.iter().enumerate() {
            let k = band_of(p.r);
            let pos = match bands.binary_search_by_key(&k, |b| b.0) {
                Ok(pos) => pos,
                Err(pos) => {
                    bands.insert(pos, (k, SphereGrid::new(2.0 * lambda * band_top(k))));
                    pos
                }
            };
            bands[pos].1.insert(i, &p.sphere);
        }
        Self { lambda, centers: ps.iter().map(|p| p.sphere).collect(), radii: ps.iter().map(|p| p.r).collect(), bands }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Shadow radius `λ r_i`.
    pub fn radius(&self, i: usize) -> f64 {
        self.lambda * self.radii[i]
    }

    /// Ids of shadows whose centre lies within `λ r_p + slack` of `x`, sorted.
    pub fn near(&self, x: &Point, slack: f64) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .bands
            .iter()
            .flat_map(|(k, grid)| grid.candidates(x, self.lambda * band_top(*k) + slack))
            .filter(|&i| sphere::chordal(x, &self.centers[i]) < self.radius(i) + slack)
            .collect();
        out.sort_unstable();
        out
    }

    /// Ids `j` in bands at most `up` levels above that of `i` whose shadow
    /// might meet the shadow of `i` enlarged by `slack`.
    fn larger_neighbours(&self, i: usize, up: usize, slack: f64) -> impl Iterator<Item = usize> + '_ {
        let ki = band_of(self.radii[i]);
        let x = self.centers[i];
        let ri = self.radius(i);
        self.bands
            .iter()
            .skip_while(move |(k, _)| *k + up < ki)
            .take_while(move |(k, _)| *k <= ki)
            .flat_map(move |(k, grid)| grid.candidates(&x, ri + self.lambda * band_top(*k) + slack))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShadowAnswer {
    /// `x` lies outside every listed open shadow.
    pub inside: bool,
    /// Set on every positive answer: shadows below the cutoff are not
    /// listed, and one of them may still contain `x`.
    pub resolution_limited: bool,
    /// A listed shadow containing `x`, when `inside` is false.
    pub witness: Option<usize>,
}

/// `V_λ` truncated at the enumeration cutoff `r_min`.
#[derive(Debug, Clone)]
pub struct ShadowComplement {
    pub lambda: f64,
    pub r_min: f64,
    parabolics: Vec<ParabolicPoint>,
    index: ShadowIndex,
}

impl ShadowComplement {
    pub fn new(lambda: f64, r_min: f64, mut parabolics: Vec<ParabolicPoint>) -> Result<Self, KleinianError> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(KleinianError::Precondition(format!("λ must lie in (0, 1], got {lambda}")));
        }
        if !(r_min > 0.0) {
            return Err(KleinianError::Precondition(format!("r_min must be positive, got {r_min}")));
        }
        sort_parabolics(&mut parabolics);
        let index = ShadowIndex::new(&parabolics, lambda);
        Ok(Self { lambda, r_min, parabolics, index })
    }

    pub fn parabolics(&self) -> &[ParabolicPoint] {
        &self.parabolics
    }

    pub fn index(&self) -> &ShadowIndex {
        &self.index
    }

    pub fn in_shadow_complement(&self, x: &Point) -> ShadowAnswer {
        let witness = self.index.near(x, 0.0).first().copied();
        ShadowAnswer { inside: witness.is_none(), resolution_limited: witness.is_none(), witness }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationReport {
    pub lambda: f64,
    pub ratio: f64,
    /// Comparable pairs close enough to need the exact cap test.
    pub pairs_checked: usize,
    /// Overlapping pairs `(i, j)` with `r_i ≥ r_j`, smallest first; at
    /// most [`SeparationReport::MAX_WITNESSES`] are kept.
    pub failures: Vec<(usize, usize)>,
    pub failure_count: usize,
}

impl SeparationReport {
    pub const MAX_WITNESSES: usize = 64;

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

fn ahead(ps: &[ParabolicPoint], j: usize, i: usize) -> bool {
    ps[j].r > ps[i].r || (ps[j].r == ps[i].r && j < i)
}

fn comparable_overlaps(ps: &[ParabolicPoint], lambda: f64) -> (usize, Vec<(usize, usize)>) {
    let index = ShadowIndex::new(ps, lambda);
    let per: Vec<(usize, Vec<(usize, usize)>)> = (0..ps.len())
        .into_par_iter()
        .map(|i| {
            let mut checked = 0;
            let mut bad = Vec::new();
            for j in index.larger_neighbours(i, COMPARABLE_BANDS, 0.0) {
                if j == i || !ahead(ps, j, i) || ps[j].r > SEPARATION_RATIO * ps[i].r {
                    continue;
                }
                checked += 1;
                if !sphere::caps_disjoint(&ps[i].sphere, index.radius(i), &ps[j].sphere, index.radius(j)) {
                    bad.push((j, i));
                }
            }
            (checked, bad)
        })
        .collect();
    let checked = per.iter().map(|p| p.0).sum();
    let mut bad: Vec<(usize, usize)> = per.into_iter().flat_map(|p| p.1).collect();
    bad.sort_unstable();
    (checked, bad)
}

/// Scans every pair with `r_p / r_q ≤ 100` for overlapping open shadows.
pub fn check_separation(ps: &[ParabolicPoint], lambda: f64) -> SeparationReport {
    let (pairs_checked, mut failures) = comparable_overlaps(ps, lambda);
    let failure_count = failures.len();
    failures.truncate(SeparationReport::MAX_WITNESSES);
    SeparationReport { lambda, ratio: SEPARATION_RATIO, pairs_checked, failures, failure_count }
}

/// The `λ` at which the shadows of `p` and `q` become tangent.
fn tangency(p: &ParabolicPoint, q: &ParabolicPoint, hi: f64) -> f64 {
    let gap = sphere::angle(&p.sphere, &q.sphere);
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if sphere::cap_angle(mid * p.r) + sphere::cap_angle(mid * q.r) > gap {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Largest `λ ≤ 1` at which [`check_separation`] passes: a coarse bisection
/// brackets it, then the tangency values of the pairs failing at the upper
/// bracket give it exactly.
pub fn find_lambda_sep(ps: &[ParabolicPoint]) -> f64 {
    let (_, bad) = comparable_overlaps(ps, 1.0);
    if bad.is_empty() {
        return 1.0;
    }
    let (mut lo, mut hi, mut hi_bad) = (0.0, 1.0, bad);
    while hi - lo > 1e-2 {
        let mid = 0.5 * (lo + hi);
        let (_, bad) = comparable_overlaps(ps, mid);
        if bad.is_empty() {
            lo = mid;
        } else {
            hi = mid;
            hi_bad = bad;
        }
    }
    hi_bad.par_iter().map(|&(i, j)| tangency(&ps[i], &ps[j], hi)).reduce(|| hi, f64::min)
}

/// `p,r_p,word_length` with `p` written `inf` or `re+imi`.
pub fn parabolics_csv(ps: &[ParabolicPoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["p", "r_p", "word_length"]).expect("in-memory write");
    for p in ps {
        let wl = p.word_length.map(|l| l.to_string()).unwrap_or_default();
        w.write_record([p.point.to_string(), p.r.to_string(), wl]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// The shadows of `ps` at `λ`, stereographically projected onto the square
/// `[−half_width, half_width]²`.
pub fn render_shadows_svg(ps: &[ParabolicPoint], lambda: f64, half_width: f64, pixels: u32) -> String {
    let mut s = String::new();
    let w = half_width;
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{pixels}" height="{pixels}" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
        -w,
        -w,
        2.0 * w,
        2.0 * w
    )
    .unwrap();
    writeln!(s, r#"<rect x="{:.6}" y="{:.6}" width="{:.6}" height="{:.6}" fill="white"/>"#, -w, -w, 2.0 * w, 2.0 * w).unwrap();
    writeln!(s, r##"<g fill="#555" stroke="none">"##).unwrap();
    for p in ps {
        match sphere::cap_to_plane(&p.sphere, lambda * p.r) {
            Some(PlaneCap::Disk { center, radius }) => {
                if center.re.abs() - radius > w || center.im.abs() - radius > w {
                    continue;
                }
                writeln!(s, r#"<circle cx="{:.6}" cy="{:.6}" r="{:.6}"/>"#, center.re, -center.im, radius).unwrap();
            }
            Some(PlaneCap::Exterior { center, radius }) => {
                writeln!(
                    s,
                    r#"<path fill-rule="evenodd" d="M{:.6} {:.6}H{:.6}V{:.6}H{:.6}Z M{:.6} {:.6}a{r:.6} {r:.6} 0 1 0 {:.6} 0a{r:.6} {r:.6} 0 1 0 {:.6} 0Z"/>"#,
                    -w,
                    -w,
                    w,
                    w,
                    -w,
                    center.re - radius,
                    -center.im,
                    2.0 * radius,
                    -2.0 * radius,
                    r = radius
                )
                .unwrap();
            }
            None => {}
        }
    }
    s.push_str("</g>\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kleinian::lattice::{local_parabolics, AnnulusQuery, Lattice};
    use crate::kleinian::mobius::BoundaryPoint;
    use crate::kleinian::Horoball;

    fn top(r_min: f64) -> Vec<ParabolicPoint> {
        let q = AnnulusQuery { center: sphere::north(), rho_in: 0.0, rho_out: 2.0, r_lo: r_min, r_hi: 1.0 };
        local_parabolics(Lattice::Gaussian, 1.0, &q)
    }

    #[test]
    fn centres_are_excluded_and_boundaries_kept() {
        let v = ShadowComplement::new(0.1, 0.05, top(0.05)).unwrap();
        for (i, p) in v.parabolics().iter().enumerate() {
            let a = v.in_shadow_complement(&p.sphere);
            assert!(!a.inside && !a.resolution_limited);
            assert_eq!(a.witness, Some(i));
        }
        let inf = v.parabolics().iter().find(|p| p.point == BoundaryPoint::Infinity).unwrap();
        // Exactly on the boundary circle of B(∞, λ) and far from the rest.
        let edge = sphere::offset(&inf.sphere, sphere::cap_angle(0.1), 0.7);
        let a = v.in_shadow_complement(&edge);
        assert!(a.inside && a.resolution_limited);
    }

    #[test]
    fn lambda_range_is_enforced() {
        assert!(ShadowComplement::new(1.5, 0.1, top(0.5)).is_err());
        assert!(ShadowComplement::new(0.0, 0.1, top(0.5)).is_err());
    }

    #[test]
    fn single_point_is_vacuously_separated() {
        let p = ParabolicPoint::from_horoball(Horoball { base: BoundaryPoint::Infinity, size: 1.0 }, None);
        assert!(check_separation(&[p.clone()], 1.0).passed());
        assert_eq!(find_lambda_sep(&[p]), 1.0);
    }

    #[test]
    fn unit_lambda_fails_with_witnesses() {
        let ps = top(0.05);
        let rep = check_separation(&ps, 1.0);
        assert!(!rep.passed());
        let (i, j) = rep.failures[0];
        assert!(ps[i].r >= ps[j].r);
        assert!(!sphere::caps_disjoint(&ps[i].sphere, ps[i].r, &ps[j].sphere, ps[j].r));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let ps = top(0.5);
        let csv = parabolics_csv(&ps);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "p,r_p,word_length");
        assert!(lines.contains(&"inf,1,") && lines.contains(&"0+0i,1,"));
        assert_eq!(lines.len(), ps.len() + 1);
    }

    #[test]
    fn svg_draws_one_shape_per_visible_shadow() {
        let ps = top(0.2);
        let svg = render_shadows_svg(&ps, 0.2, 3.0, 600);
        assert_eq!(svg.matches("<circle").count() + svg.matches("<path").count(), ps.len());
    }
}
