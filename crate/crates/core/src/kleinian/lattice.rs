//! Gaussian and Eisenstein integers, for presets whose cusp set is the
//! projective line over one of these rings.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::horoball::Horoball;
use super::mobius::BoundaryPoint;
use super::ParabolicPoint;
use crate::sphere::{self, PlaneCap, Point};

const SQRT3_2: f64 = 0.866_025_403_784_438_6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lattice {
    /// `Z[i]`, elements `m + n i`.
    Gaussian,
    /// `Z[ω]` with `ω = (−1 + i√3)/2`, elements `m + n ω`.
    Eisenstein,
}

/// Coordinates `(m, n)` in the ring basis.
pub type Elem = (i64, i64);

impl Lattice {
    pub fn norm(self, (m, n): Elem) -> i64 {
        match self {
            Lattice::Gaussian => m * m + n * n,
            Lattice::Eisenstein => m * m - m * n + n * n,
        }
    }

    pub fn to_complex(self, (m, n): Elem) -> Complex64 {
        match self {
            Lattice::Gaussian => Complex64::new(m as f64, n as f64),
            Lattice::Eisenstein => Complex64::new(m as f64 - n as f64 / 2.0, n as f64 * SQRT3_2),
        }
    }

    fn mul(self, (a, b): Elem, (c, d): Elem) -> Elem {
        match self {
            Lattice::Gaussian => (a * c - b * d, a * d + b * c),
            Lattice::Eisenstein => (a * c - b * d, a * d + b * c - b * d),
        }
    }

    fn conj(self, (m, n): Elem) -> Elem {
        match self {
            Lattice::Gaussian => (m, -n),
            Lattice::Eisenstein => (m - n, -n),
        }
    }

    /// Remainder of `a` modulo `b` with norm below `N(b)`.
    fn rem(self, a: Elem, b: Elem) -> Elem {
        let nb = self.norm(b) as f64;
        let (p, q) = self.mul(a, self.conj(b));
        let k = ((p as f64 / nb).round() as i64, (q as f64 / nb).round() as i64);
        let kb = self.mul(k, b);
        (a.0 - kb.0, a.1 - kb.1)
    }

    pub fn coprime(self, mut a: Elem, mut b: Elem) -> bool {
        while b != (0, 0) {
            let r = self.rem(a, b);
            a = b;
            b = r;
        }
        self.norm(a) == 1
    }

    /// One element from each orbit of the unit group on non-zero elements.
    fn is_unit_rep(self, e: Elem) -> bool {
        let z = self.to_complex(e);
        match self {
            Lattice::Gaussian => z.re > 0.0 && z.im >= 0.0,
            Lattice::Eisenstein => {
                let arg = z.im.atan2(z.re);
                (-1e-12..std::f64::consts::FRAC_PI_3 - 1e-12).contains(&arg) && e != (0, 0)
            }
        }
    }

    fn row_step(self) -> f64 {
        match self {
            Lattice::Gaussian => 1.0,
            Lattice::Eisenstein => SQRT3_2,
        }
    }

    /// Calls `f` on every element `z` with `lo ≤ |z − center| ≤ hi`.
    fn for_each_in_disk(self, center: Complex64, lo: f64, hi: f64, mut f: impl FnMut(Elem)) {
        let step = self.row_step();
        let n0 = ((center.im - hi) / step).ceil() as i64;
        let n1 = ((center.im + hi) / step).floor() as i64;
        for n in n0..=n1 {
            let dy = n as f64 * step - center.im;
            let wo = (hi * hi - dy * dy).max(0.0).sqrt();
            let shift = match self {
                Lattice::Gaussian => 0.0,
                Lattice::Eisenstein => n as f64 / 2.0,
            };
            let mut run = |x0: f64, x1: f64| {
                for m in (center.re + x0 + shift).ceil() as i64..=(center.re + x1 + shift).floor() as i64 {
                    let d = (self.to_complex((m, n)) - center).norm();
                    if d >= lo - 1e-9 && d <= hi + 1e-9 {
                        f((m, n));
                    }
                }
            };
            if dy.abs() < lo {
                let wi = (lo * lo - dy * dy).sqrt();
                run(-wo, -wi);
                run(wi, wo);
            } else {
                run(-wo, wo);
            }
        }
    }

    /// Lattice elements with `lo ≤ |z| ≤ hi`, row by row.
    fn annulus(self, lo: f64, hi: f64) -> Vec<Elem> {
        let mut out = Vec::new();
        self.for_each_in_disk(Complex64::new(0.0, 0.0), lo, hi, |e| out.push(e));
        out
    }
}

/// Query for [`local_parabolics`]: points in the spherical annulus
/// `rho_in ≤ d(x, center) ≤ rho_out` with shadow radius in `[r_lo, r_hi]`.
#[derive(Debug, Clone, Copy)]
pub struct AnnulusQuery {
    pub center: Point,
    pub rho_in: f64,
    pub rho_out: f64,
    pub r_lo: f64,
    pub r_hi: f64,
}

struct Filter<'a> {
    lattice: Lattice,
    height: f64,
    q: &'a AnnulusQuery,
}

impl Filter<'_> {
    fn point(&self, a: Elem, c: Elem) -> Option<ParabolicPoint> {
        let (lat, nc) = (self.lattice, self.lattice.norm(c));
        let r = (1.0 / (self.height * (lat.norm(a) + nc) as f64)).min(1.0);
        if r < self.q.r_lo || r > self.q.r_hi {
            return None;
        }
        let z = lat.to_complex(a) / lat.to_complex(c);
        let x = sphere::from_complex(z);
        let d = sphere::chordal(&x, &self.q.center);
        if d < self.q.rho_in || d > self.q.rho_out || (nc > 1 && !lat.coprime(a, c)) {
            return None;
        }
        let horoball = Horoball { base: BoundaryPoint::Finite(z), size: 1.0 / (self.height * nc as f64) };
        Some(ParabolicPoint { point: BoundaryPoint::Finite(z), sphere: x, r, word_length: None, horoball })
    }
}

/// Every cusp `a/c` (`a, c` coprime, plus `∞`) of a lattice preset with
/// cusp horoball of height `height` at `∞` that satisfies `q`. The horoball
/// at `a/c` has diameter `1/(height |c|²)`.
///
/// Caps missing `∞` are searched one denominator at a time, looking for
/// numerators near `c z0`; caps around `∞` by the annulus of `|a/c|` they
/// allow.
pub fn local_parabolics(lattice: Lattice, height: f64, q: &AnnulusQuery) -> Vec<ParabolicPoint> {
    let n_hi = 1.0 / (height * q.r_lo);
    let filter = Filter { lattice, height, q };
    let mut out = Vec::new();
    let inf = sphere::north();
    let r_inf = (1.0 / height).min(1.0);
    let d_inf = sphere::chordal(&inf, &q.center);
    if d_inf >= q.rho_in && d_inf <= q.rho_out && r_inf >= q.r_lo && r_inf <= q.r_hi {
        let horoball = Horoball { base: BoundaryPoint::Infinity, size: height };
        out.push(ParabolicPoint { point: BoundaryPoint::Infinity, sphere: inf, r: r_inf, word_length: None, horoball });
    }
    match sphere::cap_to_plane(&q.center, q.rho_out) {
        Some(PlaneCap::Disk { center, radius }) => {
            let zmin = (center.norm() - radius).max(0.0);
            let c_max = (n_hi / (1.0 + zmin * zmin)).sqrt();
            lattice.for_each_in_disk(Complex64::new(0.0, 0.0), 0.5, c_max, |c| {
                if !lattice.is_unit_rep(c) {
                    return;
                }
                let cz = lattice.to_complex(c);
                lattice.for_each_in_disk(center * cz, 0.0, radius * cz.norm(), |a| out.extend(filter.point(a, c)));
            });
        }
        _ => {
            let n_lo = 1.0 / (height * q.r_hi);
            let pi = std::f64::consts::PI;
            // Angles from the south pole, where |z| = tan(ψ/2).
            let psi_c = sphere::angle(&q.center, &-sphere::north());
            let (a_in, a_out) = (sphere::cap_angle(q.rho_in), sphere::cap_angle(q.rho_out));
            let psi_min = if psi_c > a_out {
                psi_c - a_out
            } else if psi_c >= a_in {
                0.0
            } else {
                a_in - psi_c
            };
            let psi_max = if pi - psi_c < a_in { 2.0 * pi - psi_c - a_in } else { (psi_c + a_out).min(pi) };
            let m = (psi_min / 2.0).tan();
            let big_m = if psi_max >= pi - 1e-12 { f64::INFINITY } else { (psi_max / 2.0).tan() };
            let c_bound = (n_hi / (m * m + 1.0)).sqrt();
            let cs: Vec<Elem> = lattice.annulus(0.5, c_bound).into_iter().filter(|&c| lattice.is_unit_rep(c)).collect();
            let found: Vec<Vec<ParabolicPoint>> = cs
                .par_iter()
                .map(|&c| {
                    let nc = lattice.norm(c) as f64;
                    let lo = (m * nc.sqrt()).max((n_lo - nc).max(0.0).sqrt());
                    let hi = (big_m * nc.sqrt()).min((n_hi - nc).max(0.0).sqrt());
                    let mut v = Vec::new();
                    if lo <= hi + 1e-9 {
                        lattice.for_each_in_disk(Complex64::new(0.0, 0.0), (lo - 1e-9).max(0.0), hi + 1e-9, |a| v.extend(filter.point(a, c)));
                    }
                    v
                })
                .collect();
            out.extend(found.into_iter().flatten());
        }
    }
    super::sort_parabolics(&mut out);
    out
}
