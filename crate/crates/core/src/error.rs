use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameters: need 2 <= k <= d, got d = {d}, k = {k}")]
    InvalidDimensions { d: usize, k: usize },

    #[error("k = 1 is the plain quasi-copula case and is not covered by these closed forms; use the general quasi-copula bounds instead")]
    UnsupportedK1,

    #[error("index {i} outside [{lo}, {hi}]")]
    IndexOutOfRange { i: i64, lo: i64, hi: i64 },

    #[error("no negative mass: the maximal negative volume for d = {d}, k = {k} is 0")]
    NoNegativeMass { d: usize, k: usize },

    #[error("coordinate {index} = {value} lies outside [0, 1]")]
    CoordinateOutOfRange { index: usize, value: String },

    #[error("expected a point with {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("malformed linear program: {0}")]
    MalformedLp(String),

    #[error("linear program too large: d = {d} exceeds the cap of {cap}")]
    LpTooLarge { d: usize, cap: usize },

    #[error("LP is not in canonical form for mechanical dualisation: {0}")]
    NotCanonical(String),

    #[error("simplex certificate failed: {0}")]
    CertificateFailed(String),

    #[error("coefficient overflow while building recursion tables for d = {d}, k = {k}")]
    CoefficientOverflow { d: usize, k: usize },

    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),
}
