//! Finite-depth Sierpiński curves: the sphere minus the disks bounded by
//! peripheral circles.

use rayon::prelude::*;
use serde::Serialize;

use super::arc::{max_gap, segment_grid};
use super::circle::{build_peripheral_circle, CircleSettings, ParabolicSource, PeripheralCircle};
use super::{SierpinskiError, STAGE_RATIO};
use crate::kleinian::{BoundaryPoint, ShadowIndex};
use crate::sphere::{self, Point};

/// A retained disk, the side of a peripheral circle containing its cusp.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcludedDisk {
    /// Index into the peripheral circles.
    pub circle: usize,
    pub p: BoundaryPoint,
    pub r: f64,
    /// `⌊log_50(1/r)⌋`.
    pub level: usize,
    pub diameter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Containment {
    pub samples: usize,
    /// Samples outside every listed `B(p, λ r_p)` but inside a retained disk.
    pub outer_violations: usize,
    /// Samples outside every retained disk but inside a listed `B(p, λ r_p / 4)`.
    pub inner_violations: usize,
    pub witness: Option<[f64; 3]>,
}

impl Containment {
    pub fn holds(&self) -> bool {
        self.outer_violations == 0 && self.inner_violations == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SierpinskiApprox {
    pub preset: String,
    pub settings: CircleSettings,
    pub r_min: f64,
    pub peripherals: Vec<PeripheralCircle>,
    pub excluded: Vec<ExcludedDisk>,
    /// Circles lying inside another circle's disk.
    pub discarded: Vec<usize>,
    pub containment: Containment,
    /// Largest retained diameter at each level, top level first.
    pub level_diameters: Vec<(usize, f64)>,
}

impl SierpinskiApprox {
    pub fn lambda(&self) -> f64 {
        self.settings.lambda
    }

    pub fn depth(&self) -> usize {
        self.settings.depth
    }

    pub fn diameters_decreasing(&self) -> bool {
        self.level_diameters.windows(2).all(|w| w[1].1 <= w[0].1)
    }

    pub fn certified(&self) -> bool {
        self.containment.holds() && self.diameters_decreasing() && self.peripherals.iter().all(PeripheralCircle::certified)
    }

    fn circle(&self, d: &ExcludedDisk) -> &PeripheralCircle {
        &self.peripherals[d.circle]
    }

    /// Whether `x` avoids every retained open disk.
    pub fn contains(&self, x: &Point) -> bool {
        !self.excluded.iter().any(|d| inside(self.circle(d), x))
    }
}

/// Whether `x` lies in the open disk bounded by `c` on the side of its cusp.
pub fn inside(c: &PeripheralCircle, x: &Point) -> bool {
    let d = sphere::chordal(x, &c.p.sphere);
    if d > c.max_radius {
        return false;
    }
    if d < c.min_radius {
        return true;
    }
    c.circle.winding_number_about(x) != 0
}

/// Least distance between two sampled loops, with the segments attaining it.
pub fn loop_distance(a: &[Point], b: &[Point]) -> (f64, usize, usize) {
    let gap = max_gap(a).max(max_gap(b)).max(1e-15);
    let mut h = 2.0 * gap;
    loop {
        let grid = segment_grid(b, h);
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..a.len() - 1 {
            let mid = (a[i] + a[i + 1]) * 0.5;
            for j in grid.candidates(&mid, h + gap) {
                let d = segment_gap(&a[i], &a[i + 1], &b[j], &b[j + 1]);
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        if best.0 < h || h > 4.0 {
            return best;
        }
        h *= 4.0;
    }
}

fn segment_gap(a: &Point, b: &Point, c: &Point, d: &Point) -> f64 {
    if super::arc::segments_cross(a, b, c, d) {
        return 0.0;
    }
    sphere::segment_distance(a, c, d)
        .min(sphere::segment_distance(b, c, d))
        .min(sphere::segment_distance(c, a, b))
        .min(sphere::segment_distance(d, a, b))
}

/// Lower bound on the distance between circles confined to the annuli
/// `[a1, a2]` about `p` and `[b1, b2]` about `q`.
fn ring_gap(p: &PeripheralCircle, q: &PeripheralCircle) -> f64 {
    let d = sphere::chordal(&p.p.sphere, &q.p.sphere);
    let (a1, a2, b1, b2) = (p.min_radius, p.max_radius, q.min_radius, q.max_radius);
    (d - a2 - b2).max(a1 - d - b2).max(b1 - d - a2).max(0.0)
}

fn level(r: f64) -> usize {
    ((1.0 / r).ln() / STAGE_RATIO.ln() + 1e-12).floor().max(0.0) as usize
}

const GRID_SAMPLES: usize = 10_000;

/// `n` points spread evenly over the sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<Point> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let s = (1.0 - z * z).sqrt();
            let t = golden * i as f64;
            Point::new(s * t.cos(), s * t.sin(), z)
        })
        .collect()
}

/// The global grid plus rings at `0.2, 0.5, 0.8, 1.1 λ r_p` about every cusp.
fn test_points(circles: &[PeripheralCircle], lambda: f64) -> Vec<Point> {
    let mut pts = fibonacci_sphere(GRID_SAMPLES);
    for c in circles {
        for f in [0.2, 0.5, 0.8, 1.1] {
            let alpha = sphere::cap_angle(f * lambda * c.p.r);
            pts.extend((0..8).map(|k| sphere::offset(&c.p.sphere, alpha, 0.3 + k as f64 * std::f64::consts::FRAC_PI_4)));
        }
    }
    pts
}

/// The approximation at `settings.lambda` built from every cusp with
/// `r ≥ r_min`. Circles whose disks nest are resolved by keeping the outer
/// one; intersecting circles are an error.
pub fn build_sierpinski(preset: &str, source: &ParabolicSource, settings: &CircleSettings, r_min: f64) -> Result<SierpinskiApprox, SierpinskiError> {
    settings.validate()?;
    if !(r_min > 0.0) {
        return Err(SierpinskiError::Precondition(format!("r_min must be positive, got {r_min}")));
    }
    let ps = source.all(r_min);
    let peripherals: Vec<PeripheralCircle> =
        ps.par_iter().map(|p| build_peripheral_circle(source, p, settings)).collect::<Result<_, _>>()?;
    let lambda = settings.lambda;
    let tol = settings.params.eps;
    let mut discarded = Vec::new();
    for i in 0..peripherals.len() {
        for j in i + 1..peripherals.len() {
            let (a, b) = (&peripherals[i], &peripherals[j]);
            if ring_gap(a, b) > tol {
                continue;
            }
            if loop_distance(a.circle.points(), b.circle.points()).0 <= tol {
                return Err(SierpinskiError::Construction { a: i, b: j });
            }
            if inside(a, &b.circle.points()[0]) {
                discarded.push(j);
            } else if inside(b, &a.circle.points()[0]) {
                discarded.push(i);
            }
        }
    }
    discarded.sort_unstable();
    discarded.dedup();
    let excluded: Vec<ExcludedDisk> = (0..peripherals.len())
        .filter(|i| discarded.binary_search(i).is_err())
        .map(|i| {
            let c = &peripherals[i];
            ExcludedDisk { circle: i, p: c.p.point, r: c.p.r, level: level(c.p.r), diameter: c.circle.diameter(2000) }
        })
        .collect();
    let mut level_diameters: Vec<(usize, f64)> = Vec::new();
    for d in &excluded {
        match level_diameters.iter_mut().find(|l| l.0 == d.level) {
            Some(l) => l.1 = l.1.max(d.diameter),
            None => level_diameters.push((d.level, d.diameter)),
        }
    }
    level_diameters.sort_by_key(|l| l.0);

    let mut approx = SierpinskiApprox {
        preset: preset.to_string(),
        settings: *settings,
        r_min,
        peripherals,
        excluded,
        discarded,
        containment: Containment { samples: 0, outer_violations: 0, inner_violations: 0, witness: None },
        level_diameters,
    };
    let outer = ShadowIndex::new(&ps, lambda);
    let inner = ShadowIndex::new(&ps, lambda / 4.0);
    let pts = test_points(&approx.peripherals, lambda);
    let verdicts: Vec<(bool, bool, bool)> = pts
        .par_iter()
        .map(|x| (outer.near(x, 0.0).is_empty(), approx.contains(x), inner.near(x, 0.0).is_empty()))
        .collect();
    let c = &mut approx.containment;
    c.samples = pts.len();
    for (x, (in_v, in_s, in_v4)) in pts.iter().zip(verdicts) {
        let outer_bad = in_v && !in_s;
        let inner_bad = in_s && !in_v4;
        c.outer_violations += outer_bad as usize;
        c.inner_violations += inner_bad as usize;
        if (outer_bad || inner_bad) && c.witness.is_none() {
            c.witness = Some([x.x, x.y, x.z]);
        }
    }
    Ok(approx)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntwinedReport {
    pub entwined: bool,
    pub tolerance: f64,
    pub pairs_checked: usize,
    pub min_distance: f64,
    /// Closest pair `(circle of S1, circle of S2)`.
    pub closest: Option<(usize, usize)>,
}

/// Whether no peripheral circle of `s1` comes within the tolerance of one
/// of `s2`. Requires `λ₂ ≤ λ₁ / 4`.
pub fn check_entwined(s1: &SierpinskiApprox, s2: &SierpinskiApprox) -> Result<EntwinedReport, SierpinskiError> {
    let (l1, l2) = (s1.lambda(), s2.lambda());
    if l2 > l1 / 4.0 {
        return Err(SierpinskiError::Schedule { lambda1: l1, lambda2: l2 });
    }
    if s1.preset != s2.preset {
        return Err(SierpinskiError::Precondition(format!("strata come from different presets: {} and {}", s1.preset, s2.preset)));
    }
    let tolerance = s1.settings.params.eps.max(s2.settings.params.eps);
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for a in &s1.excluded {
        for b in &s2.excluded {
            pairs.push((ring_gap(&s1.peripherals[a.circle], &s2.peripherals[b.circle]), a.circle, b.circle));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut report = EntwinedReport { entwined: true, tolerance, pairs_checked: 0, min_distance: f64::INFINITY, closest: None };
    for (lb, i, j) in pairs {
        if lb >= report.min_distance {
            break;
        }
        report.pairs_checked += 1;
        let d = loop_distance(s1.peripherals[i].circle.points(), s2.peripherals[j].circle.points()).0;
        if d < report.min_distance {
            report.min_distance = d;
            report.closest = Some((i, j));
        }
    }
    report.entwined = report.min_distance > tolerance;
    Ok(report)
}

/// The part of the outer curve inside one peripheral circle of the inner.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Piece {
    /// Index into the inner curve's peripheral circles.
    pub circle: usize,
    pub p: BoundaryPoint,
    pub level: usize,
    /// Bounded by the attaching circle.
    pub diameter: f64,
    /// Outer disks removed from the piece.
    pub holes: usize,
    /// The outer curve removes the same disk, leaving only the circle.
    pub trivial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub pieces: Vec<Piece>,
    pub nontrivial: usize,
    /// Outer disks not inside any inner disk; nonzero means the inner
    /// curve is not contained in the outer.
    pub stray_outer_disks: Vec<usize>,
    /// Test samples of `outer − inner` outside exactly one piece.
    pub covering_violations: usize,
    pub samples: usize,
    /// Largest nontrivial piece diameter per level.
    pub level_diameters: Vec<(usize, f64)>,
}

impl Decomposition {
    pub fn diameters_decreasing(&self) -> bool {
        self.level_diameters.windows(2).all(|w| w[1].1 <= w[0].1)
    }

    pub fn holds(&self) -> bool {
        self.stray_outer_disks.is_empty() && self.covering_violations == 0 && self.diameters_decreasing()
    }
}

/// Splits `outer − inner` into the pieces attached along the peripheral
/// circles of `inner`. Each piece meets `inner` in one circle; pieces are
/// disjoint because the inner disks are.
pub fn verify_decomposition(outer: &SierpinskiApprox, inner: &SierpinskiApprox) -> Result<Decomposition, SierpinskiError> {
    let mut pieces = Vec::with_capacity(inner.excluded.len());
    let mut claimed = vec![false; outer.excluded.len()];
    for d in &inner.excluded {
        let c = inner.circle(d);
        let twin = outer.excluded.iter().position(|o| outer.circle(o).circle.points() == c.circle.points());
        if let Some(k) = twin {
            claimed[k] = true;
            pieces.push(Piece { circle: d.circle, p: d.p, level: d.level, diameter: d.diameter, holes: 0, trivial: true });
            continue;
        }
        if outer.excluded.iter().any(|o| inside(outer.circle(o), &c.circle.points()[0])) {
            return Err(SierpinskiError::Decomposition { circle: d.circle });
        }
        let mut holes = 0;
        for (k, o) in outer.excluded.iter().enumerate() {
            if inside(c, &outer.circle(o).circle.points()[0]) {
                claimed[k] = true;
                holes += 1;
            }
        }
        pieces.push(Piece { circle: d.circle, p: d.p, level: d.level, diameter: d.diameter, holes, trivial: false });
    }
    let stray_outer_disks = claimed.iter().enumerate().filter(|(_, c)| !**c).map(|(k, _)| outer.excluded[k].circle).collect();

    let pts = test_points(&outer.peripherals, outer.lambda()).into_iter().chain(test_points(&inner.peripherals, inner.lambda())).collect::<Vec<_>>();
    let covering_violations = pts
        .par_iter()
        .filter(|x| {
            if !outer.contains(x) || inner.contains(x) {
                return false;
            }
            inner.excluded.iter().filter(|d| inside(inner.circle(d), x)).count() != 1
        })
        .count();

    let mut level_diameters: Vec<(usize, f64)> = Vec::new();
    for p in pieces.iter().filter(|p| !p.trivial) {
        match level_diameters.iter_mut().find(|l| l.0 == p.level) {
            Some(l) => l.1 = l.1.max(p.diameter),
            None => level_diameters.push((p.level, p.diameter)),
        }
    }
    level_diameters.sort_by_key(|l| l.0);
    Ok(Decomposition {
        nontrivial: pieces.iter().filter(|p| !p.trivial).count(),
        pieces,
        stray_outer_disks,
        covering_violations,
        samples: pts.len(),
        level_diameters,
    })
}

/// A map on finitely many sample points, defined piece by piece; piece 0
/// is the base piece that every other piece must meet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseSample {
    pub domain: Vec<Point>,
    pub image: Vec<Point>,
    /// Indices into `domain`; pieces may share boundary samples.
    pub pieces: Vec<Vec<usize>>,
    /// Diameters count as tending to zero when the largest over the later
    /// half of the pieces is at most `decay` times the largest over the
    /// earlier half.
    pub decay: f64,
    /// Continuity modulus: samples of one piece closer than `delta` must
    /// map closer than `eta`.
    pub delta: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseReport {
    /// Conditions 1 to 5: covering, base meets each piece, piece diameters
    /// decay, image diameters decay, continuity on each piece.
    pub conditions: [bool; 5],
}

impl PiecewiseReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|&c| c)
    }

    /// Numbers (from 1) of the failing conditions.
    pub fn failing(&self) -> Vec<usize> {
        self.conditions.iter().enumerate().filter(|(_, c)| !**c).map(|(i, _)| i + 1).collect()
    }
}

fn diameter(pts: impl Iterator<Item = Point> + Clone) -> f64 {
    let v: Vec<Point> = pts.collect();
    let mut d: f64 = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            d = d.max(sphere::chordal(&v[i], &v[j]));
        }
    }
    d
}

fn decays(diams: &[f64], factor: f64) -> bool {
    if diams.len() < 2 {
        return true;
    }
    let half = diams.len().div_ceil(2);
    let head = diams[..half].iter().copied().fold(0.0, f64::max);
    let tail = diams[half..].iter().copied().fold(0.0, f64::max);
    tail <= factor * head
}

/// Evaluates the five conditions under which a piecewise map is continuous.
pub fn check_piecewise(s: &PiecewiseSample) -> Result<PiecewiseReport, SierpinskiError> {
    if s.domain.len() != s.image.len() || s.pieces.is_empty() {
        return Err(SierpinskiError::Precondition("need one image per sample and a base piece".into()));
    }
    if let Some(&k) = s.pieces.iter().flatten().find(|&&k| k >= s.domain.len()) {
        return Err(SierpinskiError::Precondition(format!("piece index {k} out of range")));
    }
    let mut seen = vec![false; s.domain.len()];
    for &k in s.pieces.iter().flatten() {
        seen[k] = true;
    }
    let covering = seen.iter().all(|&b| b);
    let base: std::collections::HashSet<usize> = s.pieces[0].iter().copied().collect();
    let meets = s.pieces[1..].iter().all(|p| p.iter().any(|k| base.contains(k)));
    let rest = &s.pieces[1..];
    let dom: Vec<f64> = rest.iter().map(|p| diameter(p.iter().map(|&k| s.domain[k]))).collect();
    let img: Vec<f64> = rest.iter().map(|p| diameter(p.iter().map(|&k| s.image[k]))).collect();
    let continuous = s.pieces.iter().all(|p| {
        p.iter().all(|&a| {
            p.iter().all(|&b| sphere::chordal(&s.domain[a], &s.domain[b]) >= s.delta || sphere::chordal(&s.image[a], &s.image[b]) < s.eta)
        })
    });
    Ok(PiecewiseReport { conditions: [covering, meets, decays(&dom, s.decay), decays(&img, s.decay), continuous] })
}
