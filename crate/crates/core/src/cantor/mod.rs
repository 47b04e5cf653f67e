//! Cantor spaces given by finite-state trees, entwined embeddings, and
//! finite-depth homeomorphisms between ω-Cantor spaces.

mod chain;
mod clopen;
mod correspondence;
mod entwine;
mod examples;
mod presentation;
mod system;

pub use chain::EntwinedChain;
pub use clopen::ClopenSet;
pub use correspondence::{
    extend_homeo, free_refine, omega_homeo, omega_homeo_stream, stream_sizes, stream_to_dot, CorrespondenceAtDepth,
    CorrespondenceReport,
};
pub use entwine::{Entwinement, ExtendClopenReport, SubPresentation, MAX_HULL_WORDS, MAX_UNFOLD};
pub use examples::{alternate_chain, alternate_glued, binary_tree, glued_chain, glued_tree, iterated_glued};
pub use presentation::{TreePresentation, ValidationReport, Word};
pub use system::{NestedClopenSystem, SystemNode, SystemReport};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CantorError {
    #[error("malformed presentation: {0}")]
    Structure(String),
    #[error("state {0} has no outgoing edge")]
    DeadEnd(usize),
    #[error("state {0} is not reachable from the root")]
    Unreachable(usize),
    #[error("boundary is not perfect: no branching state reachable from state {0}")]
    NotPerfect(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("resolution exhausted: needs depth {depth}, limit {limit}; unfold the presentation further")]
    Resolution { depth: usize, limit: usize },
    #[error("hull at depth {depth} would hold {words} words, over the limit of {limit}")]
    HullSize { depth: usize, words: u128, limit: u128 },
    #[error("sub space is not entwined: cylinder {witness:?} lies inside it")]
    NotEntwined { witness: Word },
}
