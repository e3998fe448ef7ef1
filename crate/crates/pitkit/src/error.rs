use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("no prime found below the search cap")]
    SearchCapExceeded,
    #[error("no element of order {0} in the field")]
    OrderNotAvailable(u64),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(u64, u64),
    #[error("no value assigned to variable {0}")]
    MissingAssignment(u32),
    #[error("valuation of the zero function is undefined")]
    ZeroInput,
    #[error("negative valuation {0}")]
    NegativeValuation(i64),
    #[error("duplicate abscissa {0}")]
    DuplicateAbscissa(u64),
    #[error("monomial out of range: at most {max_vars} variables and exponent {max_exp}")]
    MonomialOverflow { max_vars: u32, max_exp: u32 },
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("sparse factor of degree {got} exceeds declared bound {bound}")]
    DegreeBound { got: u32, bound: u32 },
    #[error("expansion exceeded the cap of {0} terms")]
    ExpansionCap(usize),
    #[error("field lacks roots of unity of order {0}")]
    MissingRootsOfUnity(u64),
    #[error("field too small: need at least {0} elements")]
    FieldTooSmall(u64),
    #[error("characteristic too small for degree {0}")]
    CharTooSmall(u64),
    #[error("shifted factor has zero constant term")]
    ZeroConstantTerm,
    #[error("term undefined at z = 0")]
    UndefinedAtZero,
    #[error("no point of the hitting set is a non-root")]
    NoPointFound,
    #[error("point source exhausted after {0} points")]
    SourceExhausted(usize),
    #[error("generator gave up after {0} retries")]
    RetryCap(usize),
    #[error("class mismatch: {0}")]
    ClassMismatch(String),
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
