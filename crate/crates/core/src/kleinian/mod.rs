//! Horoball geometry for cusped Kleinian groups acting on the upper
//! half-space, and the shadows their horoballs cast on the sphere.

mod enumerate;
pub mod gauge;
pub mod horoball;
pub mod lattice;
pub mod mobius;
mod preset;
mod shadows;
pub mod visual;

use serde::Serialize;
use thiserror::Error;

use crate::sphere::Point;

pub use enumerate::{check_disjoint, enumerate_parabolics, EnumerationLimits};
pub use gauge::{morse_gauge_bound, GaugeBound};
pub use horoball::{fit_thresholds, penetration_diameter, Horoball, ThresholdFit, BASEPOINT};
pub use lattice::{local_parabolics, AnnulusQuery, Lattice};
pub use mobius::{BoundaryPoint, MobiusMap};
pub use preset::GroupPreset;
pub use shadows::{
    check_separation, find_lambda_sep, parabolics_csv, render_shadows_svg, ShadowAnswer, ShadowComplement, ShadowIndex,
    SeparationReport, SEPARATION_RATIO,
};
pub use visual::{visual_vs_chordal, VisualReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KleinianError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("enumeration incomplete after word length {word_length}: shadows with r_p above {floor} may be missing")]
    IncompleteEnumeration { floor: f64, word_length: usize },
    #[error("profile never reaches the threshold {required}")]
    Range { required: f64 },
    #[error("preset: {0}")]
    Preset(String),
}

/// A cusp point together with its horoball and shadow radius
/// `r = exp(−d(x0, H))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParabolicPoint {
    pub point: BoundaryPoint,
    #[serde(skip)]
    pub sphere: Point,
    pub r: f64,
    pub word_length: Option<usize>,
    pub horoball: Horoball,
}

impl ParabolicPoint {
    pub fn from_horoball(horoball: Horoball, word_length: Option<usize>) -> Self {
        Self { point: horoball.base, sphere: horoball.base.to_sphere(), r: horoball.shadow_radius(), word_length, horoball }
    }
}

/// Largest radius first; ties by position so the order is total.
pub(crate) fn sort_parabolics(ps: &mut [ParabolicPoint]) {
    ps.sort_by(|a, b| {
        b.r.total_cmp(&a.r)
            .then(a.sphere.x.total_cmp(&b.sphere.x))
            .then(a.sphere.y.total_cmp(&b.sphere.y))
            .then(a.sphere.z.total_cmp(&b.sphere.z))
    });
}
