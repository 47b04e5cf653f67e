#![allow(dead_code)]

pub mod cantor;

use omega_core::sierpinski::{FollowWitness, SphericalArc};
use omega_core::sphere::{self, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

/// A wandering arc near the point `(lat, lon)` chosen by `seed`, in units of
/// `iota`, with loops and hairpins of assorted sizes, sampled at `iota / 10`.
/// Planar coordinates are carried to the sphere by the exponential map.
pub fn synthetic_arc(seed: u64, iota: f64) -> SphericalArc {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = sphere::offset(&Point::x(), rng.random_range(0.0..1.0), rng.random_range(0.0..TAU));
    let step = 0.05;
    let mut pos = (0.0f64, 0.0f64);
    let mut heading = rng.random_range(0.0..TAU);
    let mut plane = vec![pos];
    let walk = |pos: &mut (f64, f64), heading: f64, plane: &mut Vec<(f64, f64)>| {
        pos.0 += step * heading.cos();
        pos.1 += step * heading.sin();
        plane.push(*pos);
    };
    let features = rng.random_range(2..6);
    for _ in 0..features {
        for _ in 0..rng.random_range(100..300) {
            heading += rng.random_range(-0.05..0.05);
            walk(&mut pos, heading, &mut plane);
        }
        match rng.random_range(0..3) {
            // A loop of radius rho closing to within a fraction of s.
            0 => {
                let rho: f64 = rng.random_range(1.0..7.0);
                let turns = (TAU * rho / step) as usize;
                let dir = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                for _ in 0..turns {
                    heading += dir * step / rho;
                    walk(&mut pos, heading, &mut plane);
                }
            }
            // Out and back with a small sideways offset.
            1 => {
                let len = rng.random_range(2.0..15.0);
                let n = (len / step) as usize;
                for _ in 0..n {
                    walk(&mut pos, heading, &mut plane);
                }
                let side = rng.random_range(0.1..0.4);
                heading += PI / 2.0;
                for _ in 0..(side / step).ceil() as usize {
                    walk(&mut pos, heading, &mut plane);
                }
                heading += PI / 2.0;
                for _ in 0..n {
                    walk(&mut pos, heading, &mut plane);
                }
                heading += rng.random_range(-1.0..1.0);
            }
            _ => {}
        }
    }
    let pts = plane.iter().map(|&(x, y)| sphere::offset(&base, iota * x.hypot(y), y.atan2(x))).collect();
    SphericalArc::new(pts).unwrap().refined(iota / 10.0)
}

/// Pairs `i < j` closer than `near` whose subarc reaches diameter `far`, by
/// scanning every pair. The arc length between samples bounds the subarc
/// diameter and clears most pairs without the quadratic diameter scan.
pub fn brute_violations(arc: &SphericalArc, near: f64, far: f64) -> Vec<(usize, usize)> {
    let pts = arc.points();
    let mut len = vec![0.0];
    for w in pts.windows(2) {
        len.push(len.last().unwrap() + sphere::chordal(&w[0], &w[1]));
    }
    let mut out = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if sphere::chordal(&pts[i], &pts[j]) >= near || len[j] - len[i] < far {
                continue;
            }
            let sub = &pts[i..=j];
            let reaches = sub.iter().enumerate().any(|(a, x)| sub[a + 1..].iter().any(|y| sphere::chordal(x, y) >= far));
            if reaches {
                out.push((i, j));
            }
        }
    }
    out
}

/// Checks a follow witness against its definition sample by sample.
pub fn witness_is_valid(b: &SphericalArc, a: &SphericalArc, w: &FollowWitness) -> bool {
    let (ap, bp) = (a.points(), b.points());
    w.map.len() == bp.len()
        && w.map[0] == 0
        && *w.map.last().unwrap() == ap.len() - 1
        && w.map.windows(2).all(|m| m[0] <= m[1])
        && bp.iter().zip(&w.map).all(|(x, &j)| sphere::chordal(x, &ap[j]) <= w.iota)
}

/// Winding of a loop about `p`, from the planar angles of its samples in
/// the tangent plane at `p`.
pub fn tangent_winding(loop_pts: &[Point], p: &Point) -> f64 {
    let (u, v) = {
        let t = if p.x.abs() < 0.9 { Point::x() } else { Point::y() };
        let u = (t - p * p.dot(&t)).normalize();
        (u, p.cross(&u))
    };
    let ang: Vec<f64> = loop_pts.iter().map(|x| x.dot(&v).atan2(x.dot(&u))).collect();
    ang.windows(2)
        .map(|w| {
            let mut d = w[1] - w[0];
            while d > std::f64::consts::PI {
                d -= std::f64::consts::TAU;
            }
            while d < -std::f64::consts::PI {
                d += std::f64::consts::TAU;
            }
            d
        })
        .sum()
}

/// Least distance from `q` to a loop about `p`, scanning only samples
/// whose azimuth about `p` is within `window` of that of `q`.
pub fn windowed_distance(sorted: &[(f64, Point)], p: &Point, q: &Point, window: f64) -> f64 {
    let t = sphere::azimuth(p, q);
    let mut best = f64::INFINITY;
    for shift in [-std::f64::consts::TAU, 0.0, std::f64::consts::TAU] {
        let lo = sorted.partition_point(|s| s.0 < t + shift - window);
        let hi = sorted.partition_point(|s| s.0 <= t + shift + window);
        for s in &sorted[lo..hi] {
            best = best.min(sphere::chordal(&s.1, q));
        }
    }
    best
}
