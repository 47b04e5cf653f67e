//! Peripheral circles around cusp shadows and the Sierpiński curves they
//! bound.

mod approx;
mod arc;
pub mod certificate;
mod circle;
mod follow;
mod params;
mod straighten;
mod svg;

use thiserror::Error;

use crate::kleinian::KleinianError;

pub use approx::{
    build_sierpinski, check_entwined, check_piecewise, fibonacci_sphere, inside, loop_distance, verify_decomposition, Containment,
    Decomposition, EntwinedReport, ExcludedDisk, Piece, PiecewiseReport, PiecewiseSample, SierpinskiApprox,
};
pub use arc::{SphericalArc, SphericalCircle};
pub use circle::{
    build_peripheral_circle, detour_stage, stage_iota, Avoidance, CircleSettings, ParabolicSource, PeripheralCircle, StageRecord,
};
pub use follow::{iota_follows, FollowFailure, FollowWitness};
pub use params::QuasiArcParams;
pub use straighten::{quasi_arc_violations, straighten, Straightened, Violation};
pub use svg::render_strata_svg;

/// Ratio between successive detour scales.
pub const STAGE_RATIO: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SierpinskiError {
    #[error("sampling too coarse: mesh {mesh} exceeds {required}")]
    Resolution { mesh: f64, required: f64 },
    #[error("shortcutting did not converge after {iterations} rounds; {violations} violations remain")]
    Budget { iterations: usize, violations: usize },
    #[error("detour balls around {a} and {b} overlap; λ exceeds the separation constant")]
    Separation { a: String, b: String },
    #[error("arc does not follow its source: {0}")]
    Follow(FollowFailure),
    #[error("peripheral circles {a} and {b} intersect")]
    Construction { a: usize, b: usize },
    #[error("schedule violated: λ₂ = {lambda2} must be at most λ₁/4 = {}", lambda1 / 4.0)]
    Schedule { lambda1: f64, lambda2: f64 },
    #[error("peripheral circle {circle} has no attached piece")]
    Decomposition { circle: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Kleinian(#[from] KleinianError),
}
