use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a negative fundamental discriminant")]
    NotFundamental(i64),

    #[error("2*Re(zeta) = {zeta_re2} does not give a generator of the maximal order for discriminant {disc}")]
    BadZeta { disc: i64, zeta_re2: i64 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("gram matrix is not hermitian: entry ({row},{col}) is {found}, but the conjugate of entry ({col},{row}) is {expected}")]
    NotHermitian {
        row: usize,
        col: usize,
        found: String,
        expected: String,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("lattice is not integral: {0}")]
    NotIntegral(String),

    #[error("lattice is not even: {0}")]
    NotEven(String),

    #[error("lattice is degenerate")]
    Degenerate,

    #[error("expected signature {expected:?}, found {found:?}")]
    Signature {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("vector is not in the dual lattice")]
    NotInDual,

    #[error("invalid cusp data: {0}")]
    InvalidCusp(String),

    #[error("O_k with discriminant {0} is not norm-Euclidean; cannot reduce the definite part")]
    NotEuclidean(i64),

    #[error("point is outside the hermitian domain")]
    OutsideDomain,

    #[error("point lies on the divisor: a factor has modulus {0:e}")]
    DivisorHit(f64),

    #[error("not an element of the cusp stabilizer: {0}")]
    NotInGroup(String),

    #[error("invalid Heegner combination: {0}")]
    InvalidCombo(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
