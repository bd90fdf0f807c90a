//! Error types shared by the engine modules.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("vertex index {vertex} out of range (vertex_count = {vertex_count})")]
    VertexOutOfRange { vertex: u32, vertex_count: u32 },
    #[error("simplex {0:?} has repeated vertices")]
    RepeatedVertex(Vec<u32>),
    #[error("empty simplex not allowed")]
    EmptySimplex,
    #[error("vertex {0} does not appear in any simplex")]
    UncoveredVertex(u32),
    #[error("vertex_count of 0 gives the empty complex, which is not supported")]
    EmptyComplex,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetError {
    #[error("simplex family is not up-closed: member {member} has coface {coface} outside the set")]
    NotUpClosed { member: usize, coface: usize },
    #[error("simplex family is not down-closed: member {member} has face {face} outside the set")]
    NotDownClosed { member: usize, face: usize },
    #[error("set does not belong to the expected complex")]
    ComplexMismatch,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("vertex_image has length {got}, expected {expected} (one image per domain vertex)")]
    ImageLength { got: usize, expected: usize },
    #[error("image vertex {vertex} out of range for codomain")]
    ImageVertexOutOfRange { vertex: u32 },
    #[error("image of simplex {simplex:?} is not a simplex of the codomain")]
    NotSimplicial { simplex: Vec<u32> },
    #[error("maps are not composable: codomain/domain complexes differ")]
    NotComposable,
    #[error("map and set live on different complexes")]
    ComplexMismatch,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("cover has no elements")]
    Empty,
    #[error("cover element {0} is empty")]
    EmptyElement(usize),
    #[error("simplex {0} is not covered by any element")]
    NotCovering(usize),
    #[error("covers/sets live on different complexes")]
    ComplexMismatch,
    #[error("search budget must be positive")]
    ZeroBudget,
    #[error("mediant bound needs equal-length positive denominators and weights")]
    BadMediant,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("stage {0} out of range")]
    StageOutOfRange(usize),
    #[error("block {block} out of range at stage {stage}")]
    BlockOutOfRange { stage: usize, block: usize },
    #[error("stage {0} has no blocks")]
    EmptyStage(usize),
    #[error("block space at stage {stage}, block {block} has {components} connected components; blocks must be connected")]
    DisconnectedBlock {
        stage: usize,
        block: usize,
        components: usize,
    },
    #[error("expected {expected} connecting maps for {stages} stages, found {got}")]
    MapCount {
        stages: usize,
        expected: usize,
        got: usize,
    },
    #[error("unitality violated at stage {stage}, block {block}: n = {size} but legs supply {supplied}")]
    Unitality {
        stage: usize,
        block: usize,
        size: u64,
        supplied: u64,
    },
    #[error("leg from stage {stage} block {target_block} to block {source_block} maps the wrong spaces")]
    LegSpaces {
        stage: usize,
        source_block: usize,
        target_block: usize,
    },
    #[error("goodearl multiplicities must all be at least 2 (found {0})")]
    GoodearlMultiplicity(u64),
    #[error("stage indices must satisfy i < j (got i = {i}, j = {j})")]
    BadStagePair { i: usize, j: usize },
    #[error("cover/trace data does not match the block it is attached to")]
    DataMismatch,
    #[error("ocap requires a nonnegative trace profile (vertex {vertex} is negative)")]
    NegativeTrace { vertex: usize },
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NerveError {
    #[error("subdivision level {level} too small: star of vertex {vertex} fits in no cover element")]
    LevelTooSmall { level: usize, vertex: usize },
    #[error("function and partition live on different complexes")]
    ComplexMismatch,
    #[error(transparent)]
    Cover(#[from] CoverError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BranchedError {
    #[error("branched cover has no pairs")]
    Empty,
    #[error("branched covers live on different complexes")]
    ComplexMismatch,
    #[error("cover does not refine the branched cover (element {0} fits in no underlying set)")]
    NotRefining(usize),
    #[error("projection classes required on every leg of the connecting maps")]
    MissingClasses,
    #[error("projection unitality violated at stage {stage}, block {block}: n = {size} but classes supply {supplied}")]
    ClassUnitality {
        stage: usize,
        block: usize,
        size: u64,
        supplied: u64,
    },
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VariationError {
    #[error("family member entry lives on a different complex")]
    ComplexMismatch,
    #[error("no admissible cover at this level: simplex {uncovered} lies in no set of oscillation < epsilon; subdivide further")]
    NoAdmissibleCover { uncovered: usize },
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Nerve(#[from] NerveError),
    #[error(transparent)]
    System(#[from] SystemError),
}
