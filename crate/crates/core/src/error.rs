use thiserror::Error;

/// Errors surfaced by every computation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero series")]
    DivisionByZeroSeries,
    #[error("evaluation region too close to real axis for truncation guarantee")]
    EvaluationRegion,
    #[error("outside Lambert convergence strip")]
    OutsideStrip,
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state not in M+")]
    NotInMPlus,
    #[error("state not in V_L+ basis family")]
    NotInVLPlusFamily,
    #[error("unsupported tail: {0}")]
    UnsupportedTail(String),
    #[error("no comparable range")]
    NoComparableRange,
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid rational: {0}")]
    InvalidRational(String),
    #[error("cannot read gram file: {0}")]
    GramFile(String),
    #[error("weight {requested} exceeds enumerated bound {bound}")]
    WeightBound { requested: usize, bound: usize },
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
