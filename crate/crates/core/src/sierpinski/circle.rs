//! Peripheral circles: a round circle about a cusp point, rerouted stage by
//! stage around the shadows of smaller cusps.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::arc::{segment_grid, SphericalArc, SphericalCircle};
use super::follow::iota_follows;
use super::params::QuasiArcParams;
use super::straighten::straighten;
use super::{SierpinskiError, STAGE_RATIO};
use crate::kleinian::{local_parabolics, AnnulusQuery, GroupPreset, KleinianError, Lattice, ParabolicPoint};
use crate::sphere::{self, Point, SphereGrid};

/// Where the cusp points come from.
#[derive(Debug, Clone)]
pub enum ParabolicSource {
    /// Every cusp of a lattice preset, enumerated on demand.
    Lattice { lattice: Lattice, height: f64 },
    /// A fixed list, complete for shadow radii at least `r_min`.
    Listed { parabolics: Vec<ParabolicPoint>, r_min: f64 },
}

impl ParabolicSource {
    pub fn from_preset(preset: &GroupPreset) -> Result<Self, KleinianError> {
        match (preset.lattice, preset.cusp.base) {
            (Some(lattice), crate::kleinian::BoundaryPoint::Infinity) => Ok(Self::Lattice { lattice, height: preset.cusp.size }),
            _ => Err(KleinianError::Preset(format!("{} has no arithmetic cusp description; pass an enumerated list", preset.name))),
        }
    }

    /// Cusps with `r_lo < r ≤ r_hi` at chordal distance in `[rho_in, rho_out]`
    /// from `center`, and a warning when the list cannot be complete there.
    pub fn query(&self, center: &Point, rho_in: f64, rho_out: f64, r_lo: f64, r_hi: f64) -> (Vec<ParabolicPoint>, Option<String>) {
        match self {
            Self::Lattice { lattice, height } => {
                let q = AnnulusQuery { center: *center, rho_in, rho_out, r_lo, r_hi };
                let mut ps = local_parabolics(*lattice, *height, &q);
                ps.retain(|p| p.r > r_lo);
                (ps, None)
            }
            Self::Listed { parabolics, r_min } => {
                let ps = parabolics
                    .iter()
                    .filter(|p| p.r > r_lo && p.r <= r_hi)
                    .filter(|p| (rho_in..=rho_out).contains(&sphere::chordal(&p.sphere, center)))
                    .cloned()
                    .collect();
                let warn = (r_lo < *r_min).then(|| format!("radii in ({r_lo:e}, {:e}) lie below the list floor and are unchecked", r_min.min(r_hi)));
                (ps, warn)
            }
        }
    }

    /// Every cusp with `r ≥ r_min`, largest first.
    pub fn all(&self, r_min: f64) -> Vec<ParabolicPoint> {
        match self {
            Self::Lattice { .. } => self.query(&sphere::north(), 0.0, 2.0, r_min * (1.0 - 1e-12), f64::INFINITY).0,
            Self::Listed { parabolics, .. } => parabolics.iter().filter(|p| p.r >= r_min).cloned().collect(),
        }
    }
}

/// Stage `n` works at scale `ι_n = 50^-n λ r_p`.
pub fn stage_iota(lambda: f64, r_p: f64, n: usize) -> f64 {
    lambda * r_p * STAGE_RATIO.powi(-(n as i32))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRecord {
    pub stage: usize,
    pub iota: f64,
    pub detour_radius: f64,
    /// Stage cusps within three detour radii of the arcs.
    pub nearby: usize,
    pub detours: usize,
    pub shortcuts: usize,
    pub samples: usize,
    /// Scale at which the outputs were shown to follow the inputs, and the
    /// largest displacement seen; absent for a no-op stage.
    pub follow_iota: Option<f64>,
    pub follow_distance: Option<f64>,
    /// Least distance from a nearby stage cusp to the outputs, over `ι_n`;
    /// absent when no stage cusp is near.
    pub clearance: Option<f64>,
}

/// Refined samples of `pts` at `mesh`, each tagged with the detour ball
/// containing it. Also collects the balls within `reach` of the polyline.
struct Tagged {
    points: Vec<Point>,
    inside: Vec<Option<usize>>,
    entered: BTreeSet<usize>,
    near: BTreeSet<usize>,
}

fn tag(pts: &[Point], centers: &[Point], grid: &SphereGrid, radius: f64, reach: f64, mesh: f64) -> Tagged {
    let mut t = Tagged { points: vec![pts[0]], inside: vec![None], entered: BTreeSet::new(), near: BTreeSet::new() };
    let member = |x: &Point, cand: &[usize]| cand.iter().copied().find(|&b| sphere::chordal(x, &centers[b]) < radius);
    let first: Vec<usize> = grid.candidates(&pts[0], reach).into_iter().filter(|&b| sphere::chordal(&pts[0], &centers[b]) < reach).collect();
    t.inside[0] = member(&pts[0], &first);
    for w in pts.windows(2) {
        let half = 0.5 * sphere::chordal(&w[0], &w[1]);
        let mid = (w[0] + w[1]).normalize();
        let cand: Vec<usize> = grid
            .candidates(&mid, half + reach)
            .into_iter()
            .filter(|&b| sphere::segment_distance(&centers[b], &w[0], &w[1]) < reach)
            .collect();
        t.near.extend(cand.iter().copied());
        let steps = if sphere::chordal(&w[0], &w[1]) <= mesh { vec![w[1]] } else { sphere::geodesic_steps(&w[0], &w[1], mesh) };
        for x in steps {
            let b = if cand.is_empty() { None } else { member(&x, &cand) };
            t.points.push(x);
            t.inside.push(b);
        }
    }
    t.entered = t.inside.iter().flatten().copied().collect();
    t
}

/// The point where the geodesic from `out` (outside) to `inn` (inside)
/// crosses the sphere of radius `radius` about `c`.
fn crossing(out: &Point, inn: &Point, c: &Point, radius: f64) -> Point {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if sphere::chordal(&sphere::slerp(out, inn, mid), c) < radius {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    sphere::slerp(out, inn, lo)
}

/// Samples strictly after `from` up to and including `to`, along the
/// shorter arc of the circle of radius `radius` about `c`; half-turns go
/// positively.
fn boundary_arc(c: &Point, from: &Point, to: &Point, radius: f64, mesh: f64) -> Vec<Point> {
    let alpha = sphere::cap_angle(radius);
    let t0 = sphere::azimuth(c, from);
    let mut d = sphere::azimuth(c, to) - t0;
    while d > std::f64::consts::PI {
        d -= std::f64::consts::TAU;
    }
    while d <= -std::f64::consts::PI {
        d += std::f64::consts::TAU;
    }
    let n = ((d.abs() * alpha.sin() / mesh).ceil() as usize).max(1);
    let mut out: Vec<Point> = (1..n).map(|k| sphere::offset(c, alpha, t0 + d * k as f64 / n as f64)).collect();
    out.push(*to);
    out
}

struct Rerouted {
    points: Vec<Point>,
    /// Ball containing the first sample, with the exit point.
    start: Option<usize>,
    /// Ball containing the last sample; the arc now ends at its entry point.
    end: Option<usize>,
}

fn reroute(t: &Tagged, centers: &[Point], radius: f64, mesh: f64) -> Result<Rerouted, SierpinskiError> {
    let n = t.points.len();
    let mut last: HashMap<usize, usize> = HashMap::new();
    for (i, b) in t.inside.iter().enumerate() {
        if let Some(b) = b {
            last.insert(*b, i);
        }
    }
    let whole = || SierpinskiError::Precondition("an arc lies inside a single detour ball".into());
    let mut out = Vec::with_capacity(n);
    let (mut start, mut end) = (None, None);
    let mut i = 0;
    if let Some(b) = t.inside[0] {
        let e = last[&b];
        if e + 1 == n {
            return Err(whole());
        }
        out.push(crossing(&t.points[e + 1], &t.points[e], &centers[b], radius));
        start = Some(b);
        i = e + 1;
    }
    while i < n {
        let Some(b) = t.inside[i] else {
            out.push(t.points[i]);
            i += 1;
            continue;
        };
        let prev = *out.last().expect("arc starts outside every ball");
        let entry = crossing(&prev, &t.points[i], &centers[b], radius);
        out.push(entry);
        let e = last[&b];
        if e + 1 == n {
            end = Some(b);
            break;
        }
        let exit = crossing(&t.points[e + 1], &t.points[e], &centers[b], radius);
        out.extend(boundary_arc(&centers[b], &entry, &exit, radius, mesh));
        i = e + 1;
    }
    if out.len() < 2 {
        return Err(whole());
    }
    Ok(Rerouted { points: out, start, end })
}

/// Least distance from the listed centres to the polyline, capped at `cap`.
fn clearance(pts: &[Point], ids: &BTreeSet<usize>, centers: &[Point], cap: f64) -> f64 {
    let grid = segment_grid(pts, cap.max(super::arc::max_gap(pts)));
    ids.iter()
        .flat_map(|&b| grid.candidates(&centers[b], 2.0 * cap).into_iter().map(move |s| (b, s)))
        .map(|(b, s)| sphere::segment_distance(&centers[b], &pts[s], &pts[s + 1]))
        .fold(cap, f64::min)
}

/// One detour stage for the cusp `p`. Each maximal run of `j` or `j2` inside
/// a ball `B(p', 2ι_n)` about a stage cusp (`50^-(n+1) r_p < r_p' ≤ 50^-n r_p`)
/// is replaced by an arc of the ball's boundary from the first entry to the
/// last exit; then both arcs are straightened at `ι_n` and checked to
/// `5ι_n`-follow their inputs.
///
/// When a shared endpoint lies in a ball, `j` now starts (or ends) at its
/// own crossing of the ball boundary and `j2` is extended along the
/// boundary to meet it there.
pub fn detour_stage(
    j: &SphericalArc,
    j2: &SphericalArc,
    n: usize,
    p: &ParabolicPoint,
    lambda: f64,
    parabolics: &[ParabolicPoint],
    params: &QuasiArcParams,
) -> Result<(SphericalArc, SphericalArc, StageRecord), SierpinskiError> {
    if j.start() != j2.end() || j.end() != j2.start() {
        return Err(SierpinskiError::Precondition("arcs do not share their endpoints".into()));
    }
    let iota = stage_iota(lambda, p.r, n);
    let radius = 2.0 * iota;
    let mesh = iota / 10.0;
    let (lo, hi) = (p.r * STAGE_RATIO.powi(-(n as i32) - 1), p.r * STAGE_RATIO.powi(-(n as i32)));
    let stage: Vec<&ParabolicPoint> = parabolics.iter().filter(|q| q.r > lo && q.r <= hi && q.sphere != p.sphere).collect();
    let centers: Vec<Point> = stage.iter().map(|q| q.sphere).collect();
    let mut record = StageRecord {
        stage: n,
        iota,
        detour_radius: radius,
        nearby: 0,
        detours: 0,
        shortcuts: 0,
        samples: j.len() + j2.len(),
        follow_iota: None,
        follow_distance: None,
        clearance: None,
    };
    if stage.is_empty() {
        return Ok((j.clone(), j2.clone(), record));
    }
    let reach = 3.0 * radius;
    let cell = (2.0 * reach).max(j.max_gap()).max(j2.max_gap());
    let grid = SphereGrid::from_points(cell, centers.iter());
    let tj = tag(j.points(), &centers, &grid, radius, reach, mesh);
    let tj2 = tag(j2.points(), &centers, &grid, radius, reach, mesh);
    let near: BTreeSet<usize> = tj.near.union(&tj2.near).copied().collect();
    record.nearby = near.len();
    let entered: BTreeSet<usize> = tj.entered.union(&tj2.entered).copied().collect();
    if entered.is_empty() {
        let cap = 2.0 * radius;
        if !near.is_empty() {
            record.clearance = Some(clearance(j.points(), &near, &centers, cap).min(clearance(j2.points(), &near, &centers, cap)) / iota);
        }
        return Ok((j.clone(), j2.clone(), record));
    }
    let ball_grid = SphereGrid::from_points(2.0 * radius, centers.iter());
    for &b in &entered {
        for o in ball_grid.candidates(&centers[b], 2.0 * radius) {
            if o != b && sphere::chordal(&centers[b], &centers[o]) < 2.0 * radius {
                return Err(SierpinskiError::Separation { a: stage[b].point.to_string(), b: stage[o].point.to_string() });
            }
        }
    }
    let rj = reroute(&tj, &centers, radius, mesh)?;
    let rj2 = reroute(&tj2, &centers, radius, mesh)?;
    let pj = rj.points;
    let mut pj2 = rj2.points;
    if let Some(b) = rj.start {
        let meet = pj[0];
        let from = *pj2.last().expect("non-empty");
        pj2.extend(boundary_arc(&centers[b], &from, &meet, radius, mesh));
    }
    if let Some(b) = rj.end {
        let meet = *pj.last().expect("non-empty");
        let mut head = vec![meet];
        head.extend(boundary_arc(&centers[b], &meet, &pj2[0], radius, mesh));
        head.extend_from_slice(&pj2[1..]);
        pj2 = head;
    }
    let a = SphericalArc::from_points(pj);
    let a2 = SphericalArc::from_points(pj2);
    let sj = straighten(&a, iota, params)?;
    let sj2 = straighten(&a2, iota, params)?;
    let follow = 5.0 * iota;
    let wj = iota_follows(&sj.arc, &SphericalArc::from_points(tj.points), follow)?;
    let wj2 = iota_follows(&sj2.arc, &SphericalArc::from_points(tj2.points), follow)?;
    let cap = 2.0 * radius;
    record.clearance = Some(clearance(sj.arc.points(), &near, &centers, cap).min(clearance(sj2.arc.points(), &near, &centers, cap)) / iota);
    record.detours = entered.len();
    record.shortcuts = sj.shortcuts + sj2.shortcuts;
    record.samples = sj.arc.len() + sj2.arc.len();
    record.follow_iota = Some(follow);
    record.follow_distance = Some(wj.max_distance.max(wj2.max_distance));
    Ok((sj.arc, sj2.arc, record))
}

/// How far the finished circle keeps from enumerated cusps other than `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Avoidance {
    pub checked: usize,
    /// Least `d(p', γ) / (λ r_p')`, capped at `9/8`; must be at least `3/4`.
    pub margin: f64,
    pub closest: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeripheralCircle {
    pub p: ParabolicPoint,
    pub lambda: f64,
    pub depth: usize,
    #[serde(skip)]
    pub circle: SphericalCircle,
    pub samples: usize,
    pub stages: Vec<StageRecord>,
    pub warnings: Vec<String>,
    pub min_radius: f64,
    pub max_radius: f64,
    pub winding_angle: f64,
    pub winding_number: i64,
    /// Largest radial deviation from the starting circle of radius `λ r_p / 2`.
    pub drift: f64,
    pub avoidance: Avoidance,
    pub self_intersection: Option<(usize, usize)>,
    /// The loop after each stage, decimated for drawing.
    #[serde(skip)]
    pub snapshots: Vec<Vec<Point>>,
}

const AVOIDANCE_CAP: f64 = 1.125;

const SNAPSHOT_SAMPLES: usize = 720;

fn snapshot(j: &SphericalArc, j2: &SphericalArc) -> Vec<Point> {
    let n = j.len() + j2.len();
    let stride = n.div_ceil(SNAPSHOT_SAMPLES).max(1);
    let mut out: Vec<Point> = j.points().iter().chain(&j2.points()[1..]).step_by(stride).copied().collect();
    out.push(*j.start());
    out
}

impl PeripheralCircle {
    pub fn in_annulus(&self) -> bool {
        let s = self.lambda * self.p.r;
        self.min_radius > s / 4.0 && self.max_radius < 0.75 * s
    }

    pub fn drift_bounded(&self) -> bool {
        self.drift <= self.lambda * self.p.r / 9.0
    }

    pub fn winding_ok(&self) -> bool {
        self.winding_number == 1 && (self.winding_angle - std::f64::consts::TAU).abs() < 1e-6
    }

    pub fn certified(&self) -> bool {
        self.in_annulus()
            && self.drift_bounded()
            && self.winding_ok()
            && self.avoidance.margin >= 0.75
            && self.self_intersection.is_none()
            && self.stages.iter().all(|s| s.clearance.is_none_or(|c| c >= 1.0))
    }
}

/// Settings shared by every circle of a construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleSettings {
    pub lambda: f64,
    /// The separation constant; `lambda` may not exceed it.
    pub lambda0: f64,
    pub depth: usize,
    pub params: QuasiArcParams,
}

impl CircleSettings {
    pub fn validate(&self) -> Result<(), SierpinskiError> {
        self.params.validate()?;
        if !(self.lambda > 0.0 && self.lambda <= self.lambda0 * (1.0 + 1e-12)) {
            return Err(SierpinskiError::Precondition(format!("λ = {} must lie in (0, λ0 = {}]", self.lambda, self.lambda0)));
        }
        Ok(())
    }
}

/// Distances from `xs` to the polyline `pts`, each exact when below its
/// `reach` and reported as `reach` otherwise.
fn reach_distances(pts: &[Point], xs: &[(Point, f64)]) -> Vec<f64> {
    let gap = super::arc::max_gap(pts);
    let mut grids: HashMap<i32, SphereGrid> = HashMap::new();
    xs.iter()
        .map(|(x, reach)| {
            let level = reach.max(gap).log2().ceil() as i32;
            let cell = 2f64.powi(level);
            let grid = grids.entry(level).or_insert_with(|| segment_grid(pts, cell));
            grid.candidates(x, reach + cell)
                .into_iter()
                .map(|s| sphere::segment_distance(x, &pts[s], &pts[s + 1]))
                .fold(*reach, f64::min)
        })
        .collect()
}

/// The peripheral circle about `p`: the circle of radius `λ r_p / 2`, split
/// at azimuths `0` and `π` into `J` and `J'`, run through `depth` detour
/// stages.
pub fn build_peripheral_circle(source: &ParabolicSource, p: &ParabolicPoint, settings: &CircleSettings) -> Result<PeripheralCircle, SierpinskiError> {
    settings.validate()?;
    let lambda = settings.lambda;
    let scale = lambda * p.r;
    let rho = scale / 2.0;
    let alpha = sphere::cap_angle(rho);
    let mesh0 = stage_iota(lambda, p.r, 1) / 10.0;
    let half = ((std::f64::consts::PI * alpha.sin() / mesh0).ceil() as usize).max(4);
    let ring = |from: f64| -> Vec<Point> {
        (0..=half).map(|k| sphere::offset(&p.sphere, alpha, from + std::f64::consts::PI * k as f64 / half as f64)).collect()
    };
    let mut j = SphericalArc::from_points(ring(0.0));
    let mut j2 = ring(std::f64::consts::PI);
    *j2.last_mut().expect("non-empty") = *j.start();
    j2[0] = *j.end();
    let mut j2 = SphericalArc::from_points(j2);

    let mut warnings = Vec::new();
    let mut checked: Vec<ParabolicPoint> = Vec::new();
    let extent = |j: &SphericalArc, j2: &SphericalArc| {
        let d = j.points().iter().chain(j2.points()).map(|x| sphere::chordal(x, &p.sphere));
        let (lo, hi) = d.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        (lo - j.max_gap().max(j2.max_gap()), hi)
    };
    // Cusps at least as large as the stage-1 ones are kept away by separation.
    let (lo, hi) = extent(&j, &j2);
    let (big, warn) = source.query(&p.sphere, (lo - 0.75 * scale).max(0.0), hi + 0.75 * scale, p.r / STAGE_RATIO, p.r);
    warnings.extend(warn.map(|w| format!("stage 0: {w}")));
    checked.extend(big.into_iter().filter(|q| q.sphere != p.sphere));

    let mut stages = Vec::with_capacity(settings.depth);
    let mut snapshots = Vec::with_capacity(settings.depth);
    for n in 1..=settings.depth {
        let iota = stage_iota(lambda, p.r, n);
        let (lo, hi) = extent(&j, &j2);
        let pad = 6.0 * iota;
        let r_lo = p.r * STAGE_RATIO.powi(-(n as i32) - 1);
        let (found, warn) = source.query(&p.sphere, (lo - pad).max(0.0), hi + pad, r_lo, p.r * STAGE_RATIO.powi(-(n as i32)));
        warnings.extend(warn.map(|w| format!("stage {n}: {w}")));
        let (a, b, record) = detour_stage(&j, &j2, n, p, lambda, &found, &settings.params)?;
        checked.extend(found);
        stages.push(record);
        j = a;
        j2 = b;
        snapshots.push(snapshot(&j, &j2));
    }

    let circle = SphericalCircle::from_arcs(&j, &j2, p.sphere)?;
    let pts = circle.points();
    let min_radius = circle.min_radius();
    let max_radius = circle.max_radius();
    let winding_angle = circle.winding_angle();
    let targets: Vec<(Point, f64)> = checked.iter().map(|q| (q.sphere, AVOIDANCE_CAP * lambda * q.r)).collect();
    let dists = reach_distances(pts, &targets);
    let mut avoidance = Avoidance { checked: checked.len(), margin: f64::INFINITY, closest: None };
    for (q, d) in checked.iter().zip(&dists) {
        let m = d / (lambda * q.r);
        if m < avoidance.margin {
            avoidance.margin = m;
            avoidance.closest = Some(q.point.to_string());
        }
    }
    let tol = settings.params.eps * stage_iota(lambda, p.r, settings.depth);
    let self_intersection = circle.self_intersection(tol);
    Ok(PeripheralCircle {
        p: p.clone(),
        lambda,
        depth: settings.depth,
        samples: pts.len(),
        stages,
        warnings,
        min_radius,
        max_radius,
        winding_angle,
        winding_number: (winding_angle / std::f64::consts::TAU).round() as i64,
        drift: (rho - min_radius).max(max_radius - rho),
        avoidance,
        self_intersection,
        snapshots,
        circle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kleinian::{BoundaryPoint, Horoball};
    use num_complex::Complex64;

    fn cusp(z: Complex64, r: f64) -> ParabolicPoint {
        // Only the position and the shadow radius matter here.
        let mut q = ParabolicPoint::from_horoball(Horoball { base: BoundaryPoint::Finite(z), size: 1.0 }, None);
        q.r = r;
        q
    }

    fn halves(p: &ParabolicPoint, lambda: f64) -> (SphericalArc, SphericalArc) {
        let c = SphericalCircle::round(&p.sphere, lambda * p.r / 2.0, stage_iota(lambda, p.r, 1) / 10.0);
        let pts = c.points();
        let m = pts.len() / 2;
        (SphericalArc::from_points(pts[..=m].to_vec()), SphericalArc::from_points(pts[m..].to_vec()))
    }

    #[test]
    fn empty_stage_is_a_no_op() {
        let p = ParabolicPoint::from_horoball(Horoball { base: BoundaryPoint::Finite(Complex64::new(0.0, 0.0)), size: 1.0 }, None);
        let (j, j2) = halves(&p, 0.01);
        let (a, b, rec) = detour_stage(&j, &j2, 1, &p, 0.01, &[], &QuasiArcParams::default()).unwrap();
        assert_eq!((a, b), (j, j2));
        assert_eq!(rec.detours, 0);
    }

    #[test]
    fn single_ball_is_avoided() {
        let p = ParabolicPoint::from_horoball(Horoball { base: BoundaryPoint::Finite(Complex64::new(0.0, 0.0)), size: 1.0 }, None);
        let lambda = 0.01;
        let (j, j2) = halves(&p, lambda);
        // A stage-1 cusp sitting on J.
        let x = j.points()[j.len() / 3];
        let q = cusp(sphere::to_complex(&x).unwrap(), p.r / 60.0);
        let (a, b, rec) = detour_stage(&j, &j2, 1, &p, lambda, std::slice::from_ref(&q), &QuasiArcParams::default()).unwrap();
        assert_eq!(rec.detours, 1);
        assert!(rec.clearance.unwrap() >= 1.0);
        assert!(a.distance_to(&q.sphere) >= 2.0 * rec.iota * (1.0 - 1e-3));
        assert_eq!(b.points(), j2.refined(rec.iota / 10.0).points());
        assert_eq!(a.start(), j.start());
        assert!(rec.follow_distance.unwrap() <= 5.0 * rec.iota);
    }

    #[test]
    fn endpoint_ball_moves_both_arcs() {
        let p = ParabolicPoint::from_horoball(Horoball { base: BoundaryPoint::Finite(Complex64::new(0.0, 0.0)), size: 1.0 }, None);
        let lambda = 0.01;
        let (j, j2) = halves(&p, lambda);
        let q = cusp(sphere::to_complex(j.start()).unwrap(), p.r / 60.0);
        let (a, b, rec) = detour_stage(&j, &j2, 1, &p, lambda, std::slice::from_ref(&q), &QuasiArcParams::default()).unwrap();
        assert_eq!(a.start(), b.end());
        assert_eq!(a.end(), b.start());
        assert!((sphere::chordal(a.start(), &q.sphere) - 2.0 * rec.iota).abs() < 1e-12);
        let c = SphericalCircle::from_arcs(&a, &b, p.sphere).unwrap();
        assert!(c.distance_to(&q.sphere) >= 2.0 * rec.iota * (1.0 - 1e-3));
        assert!(c.self_intersection(1e-15).is_none());
    }

    #[test]
    fn overlapping_balls_are_rejected() {
        let p = ParabolicPoint::from_horoball(Horoball { base: BoundaryPoint::Finite(Complex64::new(0.0, 0.0)), size: 1.0 }, None);
        let lambda = 0.01;
        let (j, j2) = halves(&p, lambda);
        let x = j.points()[j.len() / 3];
        let y = sphere::offset(&x, sphere::cap_angle(stage_iota(lambda, p.r, 1)), 0.0);
        let qs = [cusp(sphere::to_complex(&x).unwrap(), p.r / 60.0), cusp(sphere::to_complex(&y).unwrap(), p.r / 60.0)];
        let err = detour_stage(&j, &j2, 1, &p, lambda, &qs, &QuasiArcParams::default()).unwrap_err();
        assert!(matches!(err, SierpinskiError::Separation { .. }));
    }

    #[test]
    fn isolated_cusp_gets_a_round_circle() {
        let source = ParabolicSource::Listed { parabolics: vec![], r_min: 1e-12 };
        let p = ParabolicPoint::from_horoball(Horoball { base: BoundaryPoint::Infinity, size: 1.0 }, None);
        let settings = CircleSettings { lambda: 0.01, lambda0: 0.01, depth: 2, params: QuasiArcParams::default() };
        let c = build_peripheral_circle(&source, &p, &settings).unwrap();
        assert!(c.certified(), "{c:?}");
        assert!(c.drift < 1e-7);
        assert_eq!(c.snapshots.len(), 2);
        assert!(c.warnings.is_empty());
        let too_big = CircleSettings { lambda: 0.02, ..settings };
        assert!(build_peripheral_circle(&source, &p, &too_big).is_err());
    }
}
