use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("division by an element with zero value component")]
    DivisionByZero,

    #[error("{func} is not defined (or not twice differentiable) at {value}")]
    Domain { func: &'static str, value: String },

    #[error("{0} is transcendental and cannot be evaluated in exact mode")]
    TranscendentalInExactMode(&'static str),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("exponent at byte {offset} must be an integer literal")]
    NonIntegerExponent { offset: usize },

    #[error("expression expects {expected} arguments, got {found}")]
    Arity { expected: usize, found: usize },

    #[error("arguments belong to different algebras")]
    IncompatibleArguments,

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("matrix is not positive definite (leading minor {minor} is not positive)")]
    NotPositiveDefinite { minor: usize },

    #[error("Cholesky pivot {pivot} has no rational square root; use float64 mode")]
    IrrationalSqrt { pivot: String },

    #[error("matrix is singular")]
    Singular,

    #[error("linear map has rank {rank}, expected full row rank {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("coordinate `{0}` is declared twice")]
    DuplicateCoordinate(String),

    #[error("point is not an infinitesimal neighbour of the base point (coordinate {coord})")]
    NotNilpotent { coord: usize },
}
