//! Graphs of groups, their Bass–Serre trees, and an empirical probe of how
//! geodesics with small coset intersections project to the tree.

mod ball;
mod fit;
mod group;

pub use ball::{vertex_intersection_diameter, CayleyBall, ProjectionReport, MAX_ELEMENTS, MAX_RADIUS};
pub use fit::{fit_quasi_geodesic, fits_csv, geodesic_family, Extremal, FitOptions, QuasiIsomFit};
pub use group::{EdgeSpec, Element, GenKind, Generator, GraphOfGroupsPreset, Group, Letter, Syllable, VertexGroup, Word};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BassSerreError {
    #[error("preset: {0}")]
    Preset(String),
    #[error("unknown letter {0:?}")]
    Letter(char),
    #[error("radius {radius} exceeds the limit of {limit}")]
    Radius { radius: usize, limit: usize },
    #[error("a ball of radius {radius} would hold about {projected} elements, over the limit of {limit}")]
    Size { radius: usize, projected: usize, limit: usize },
    #[error("a word of length {length} leaves the ball of radius {radius}")]
    OutsideBall { length: usize, radius: usize },
    #[error("{word} is not geodesic: {witness} reaches the same element in {distance} < {length} steps")]
    NotGeodesic { word: String, length: usize, distance: usize, witness: String },
    #[error("the family is empty")]
    EmptyFamily,
}
