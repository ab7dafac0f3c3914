use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point ({0}, {1}) is not strictly inside the bidisk")]
    PointOutsideBidisk(String, String),

    #[error("polynomial is not divisible by the given divisor (remainder has {0} terms)")]
    NotDivisible(usize),

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("symbol sup norm {0} exceeds 1")]
    NotContractive(f64),

    #[error("the pencil matrix is numerically singular")]
    SingularPencil,

    #[error("|symbol(0)| = {0} lies on the unit circle")]
    OriginOnBoundary(f64),

    #[error("symbol is identically zero")]
    DegenerateSymbol,

    #[error("duplicate term ({0}, {1})")]
    DuplicateTerm(i64, i64),

    #[error("negative exponent ({0}, {1}) in an analytic polynomial")]
    NegativeExponent(i64, i64),

    #[error("point set is empty")]
    EmptyPointSet,

    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),

    #[error("{0} must depend on a single variable")]
    NotOneVariable(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
