use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::KleinianError;
use crate::sphere::{self, Point};

/// A point of `C ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint {
    Finite(Complex64),
    Infinity,
}

impl BoundaryPoint {
    pub fn to_sphere(self) -> Point {
        match self {
            BoundaryPoint::Finite(z) => sphere::from_complex(z),
            BoundaryPoint::Infinity => sphere::north(),
        }
    }

    pub fn from_sphere(p: &Point) -> Self {
        sphere::to_complex(p).map_or(BoundaryPoint::Infinity, BoundaryPoint::Finite)
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Infinity => f.write_str("inf"),
            BoundaryPoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

/// `"inf"` or `[re, im]`.
impl Serialize for BoundaryPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            BoundaryPoint::Infinity => s.serialize_str("inf"),
            BoundaryPoint::Finite(z) => [z.re, z.im].serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for BoundaryPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Name(String),
            Pair([f64; 2]),
        }
        match Repr::deserialize(d)? {
            Repr::Name(s) if s == "inf" => Ok(BoundaryPoint::Infinity),
            Repr::Name(s) => Err(serde::de::Error::custom(format!("unknown boundary point {s:?}; use \"inf\" or [re, im]"))),
            Repr::Pair([re, im]) => Ok(BoundaryPoint::Finite(Complex64::new(re, im))),
        }
    }
}

/// A Möbius transformation `z ↦ (az + b)/(cz + d)` with `ad − bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

const DET_TOL: f64 = 1e-12;

impl MobiusMap {
    /// Scales the matrix to determinant one.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self, KleinianError> {
        let det = a * d - b * c;
        if det.norm() < 1e-14 {
            return Err(KleinianError::Degenerate(format!("singular matrix, det = {det}")));
        }
        let s = det.sqrt();
        let m = Self { a: a / s, b: b / s, c: c / s, d: d / s };
        debug_assert!((m.det() - 1.0).norm() <= DET_TOL * (1.0 + m.scale()));
        Ok(m)
    }

    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self { a: o, b: z, c: z, d: o }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    fn scale(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm()).max(self.d.norm())
    }

    pub fn is_normalized(&self) -> bool {
        (self.det() - 1.0).norm() <= DET_TOL * (1.0 + self.scale() * self.scale())
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn apply(&self, p: BoundaryPoint) -> BoundaryPoint {
        match p {
            BoundaryPoint::Infinity => {
                if self.c.norm() <= 1e-14 * self.a.norm() {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(self.a / self.c)
                }
            }
            BoundaryPoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm() <= 1e-14 * (self.a * z + self.b).norm() {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Action on the upper half-space, `(z, t)` with `t > 0`.
    pub fn apply_interior(&self, z: Complex64, t: f64) -> (Complex64, f64) {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let cz_d = c * z + d;
        let den = cz_d.norm_sqr() + c.norm_sqr() * t * t;
        let num = (a * z + b) * cz_d.conj() + a * c.conj() * t * t;
        (num / den, t / den)
    }
}

impl Mul for MobiusMap {
    type Output = MobiusMap;

    fn mul(self, o: MobiusMap) -> MobiusMap {
        MobiusMap {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

/// `[[re, im], [re, im], [re, im], [re, im]]` for `a, b, c, d`.
impl Serialize for MobiusMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.a, self.b, self.c, self.d].map(|z| [z.re, z.im]).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MobiusMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let e = <[[f64; 2]; 4]>::deserialize(d)?;
        let [a, b, c, dd] = e.map(|[re, im]| Complex64::new(re, im));
        MobiusMap::new(a, b, c, dd).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normalizes_and_inverts() {
        let m = MobiusMap::new(c(2.0, 0.0), c(1.0, 1.0), c(0.0, 0.0), c(2.0, 0.0)).unwrap();
        assert!(m.is_normalized());
        let id = m * m.inverse();
        assert!((id.a - 1.0).norm() < 1e-12 && id.b.norm() < 1e-12);
        assert!(MobiusMap::new(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)).is_err());
    }

    #[test]
    fn inversion_swaps_zero_and_infinity() {
        let s = MobiusMap::new(c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(s.apply(BoundaryPoint::Infinity), BoundaryPoint::Finite(c(0.0, 0.0)));
        assert_eq!(s.apply(BoundaryPoint::Finite(c(0.0, 0.0))), BoundaryPoint::Infinity);
        let (z, t) = s.apply_interior(c(0.0, 0.0), 1.0);
        assert!(z.norm() < 1e-15 && (t - 1.0).abs() < 1e-15);
    }

    #[test]
    fn json_forms() {
        let m: MobiusMap = serde_json::from_str("[[1,0],[1,0],[0,0],[1,0]]").unwrap();
        assert_eq!(m.apply(BoundaryPoint::Finite(c(0.5, 0.0))), BoundaryPoint::Finite(c(1.5, 0.0)));
        let p: BoundaryPoint = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(p, BoundaryPoint::Infinity);
        assert!(serde_json::from_str::<BoundaryPoint>("\"nan\"").is_err());
    }
}
