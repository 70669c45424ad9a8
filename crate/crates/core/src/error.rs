use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("denominator Pochhammer vanishes at summation index k = {k}")]
    DenominatorPole { k: u32 },

    #[error("binomial upper argument {0} is negative")]
    NegativeBinomial(i64),

    #[error("inadmissible parameters: pair ({i},{j}) has l_{i} + l_{j} < N")]
    Inadmissible { i: usize, j: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("point {0:?} is outside the lattice domain")]
    PointOutsideDomain(Vec<u32>),

    #[error("index {0:?} is outside the index polytope H")]
    IndexOutsideH(Vec<u32>),

    #[error("operation requires d = {expected}, got d = {got}")]
    WrongDimension { expected: usize, got: usize },

    #[error("family parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("operator family does not define the pair ({0}, {1})")]
    UnsupportedPair(usize, usize),

    #[error("operators live in different representations or domains")]
    RepresentationMismatch,

    #[error("relation needs at least {needed} homogeneous indices, have {got}")]
    NeedsDimension { needed: usize, got: usize },

    #[error("vector length {got} does not match domain size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("problem size {size} exceeds the desk-scale bound {bound}")]
    TooLarge { size: usize, bound: usize },

    #[error("internal consistency violation: {0}")]
    InternalConsistency(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
