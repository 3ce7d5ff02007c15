use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid Gram matrix: {0}")]
    InvalidGram(String),
    #[error("unknown lattice name `{0}`")]
    UnknownLattice(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vector {0} is not in the dual lattice")]
    NotInDual(String),
    #[error("series live on different lattices")]
    LatticeMismatch,
    #[error("series have different Jacobi indices")]
    IndexMismatch,
    #[error("q-exponent {0} is not a multiple of 1/24")]
    BadQExponent(String),
    #[error("series is not invertible: {0}")]
    NotInvertible(String),
    #[error("theta block has half-integral ζ-exponents outside L∨")]
    HalfIntegralExponents,
    #[error("non-integral q-exponent {0} where an integral grading is required")]
    NonIntegralGrading(String),
    #[error("Hecke operator needs m >= 1, got {0}")]
    BadHeckeIndex(i64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precision exhausted: coefficient f({n}, {ell}) is outside the known range")]
    PrecisionExhausted { n: String, ell: String },
    #[error("exact division failed at q^{0}: the remainder does not vanish")]
    Inconsistent(String),
    #[error("singular coefficient f({n}, {ell}) = {value} is not an integer")]
    NonIntegralSingular { n: String, ell: String, value: String },
    #[error("index ({n}, {ell}) is not singular")]
    NotSingular { n: String, ell: String },
    #[error("coefficient orbit violated: f{first} = {a} but f{second} = {b}")]
    OrbitViolation {
        first: String,
        second: String,
        a: String,
        b: String,
    },
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("malformed series file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
