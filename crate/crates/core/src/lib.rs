//! Exact combinatorial engine for mean-dimension invariants of AH inductive
//! systems over finite simplicial complexes with diagonal eigenvalue maps.
//!
//! Spaces are finite abstract simplicial complexes; open sets are up-closed
//! simplex families; all reported values are exact rationals. Values are
//! exact within this combinatorial model at the chosen subdivision level and
//! are upper bounds for their topological counterparts.

pub mod bits;
pub mod branched;
pub mod capacity;
pub mod cover;
pub mod error;
pub mod nerve;
pub mod rat;
pub mod simplicial;
pub mod system;
pub mod variation;

pub use bits::SimplexSet;
pub use cover::{
    greedy_refinement, join, mediant_bound, ord, pullback_cover, refinement_dimension, Cover,
    RefinementCertificate, RefinementResult,
};
pub use rat::{format_rat, parse_rat, rat, rat_int, Rat};
pub use simplicial::{
    barycentric_subdivide, closure_and_boundary, open_star, preimage, star_neighborhood,
    ClosedSet, Complex, OpenSet, PLFunction, SimplicialMap, Subdivision, Tower,
};
pub use system::{
    build_goodearl, compose_maps, mean_dimension_sequence, pullback_stage_cover, AHSystem, Block,
    DiagonalMap, Leg, MeanDimEstimate, ProjectionClass,
};
