use thiserror::Error;

use crate::glue::CompatibilityError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("vector is not a member of the lattice")]
    NotInLattice,

    #[error("zero vector has no primitivity")]
    ZeroVector,

    #[error("lattice is not a sublattice of the given superlattice")]
    NotSublattice,

    #[error("lattice basis is rank deficient or not square ({rows}x{cols})")]
    RankDeficient { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("point index {index} out of range (simplex has {len} lattice points)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("point {0:?} does not lie on the selected face")]
    NotOnFace(Vec<i64>),

    #[error("{what} exceeds bound: {actual} > {limit}")]
    BoundExceeded {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),

    #[error("triangulations live on different simplices: {0}")]
    MixedLevels(String),

    #[error("triangulation is not invariant under the symmetric group")]
    NonInvariant,

    #[error(
        "dilation bound exceeded after {attempts} attempts (last level {last_level}): {reason}"
    )]
    DilationBoundExceeded {
        attempts: usize,
        last_level: u64,
        reason: String,
    },

    #[error("fan is not a subdivision of the orthant: {0}")]
    NotASubdivision(String),

    #[error("ray lies outside the support of the fan")]
    OutsideSupport,

    #[error("cone is not simplicial: {0}")]
    NotSimplicial(String),

    #[error("tower too shallow: extend tower beyond depth {depth}")]
    TowerTooShallow { depth: usize },

    #[error("{0}")]
    Compatibility(#[from] CompatibilityError),

    #[error("r = {0} is not supported here")]
    Unsupported(usize),
}
