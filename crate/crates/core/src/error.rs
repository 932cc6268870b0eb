use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("gcd({0}, {1}) = {2}, coefficients of a linear form must be coprime")]
    Gcd(i64, i64, i64),
    #[error("resultant Delta_{{{0},{1}}} vanishes")]
    Degenerate(usize, usize),
    #[error("coefficient {0} exceeds the size cap {1}")]
    CoefficientTooLarge(i64, i64),
    #[error("{0} is not a split prime of Z[i]")]
    NotSplit(u64),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("class {0:?} is not in Sigma")]
    ClassNotInSigma([i64; 4]),
    #[error("torsor lift failed: {0}")]
    LiftFailure(String),
    #[error("point lies over a root of the quartic")]
    DegeneratePoint,
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("even modulus d_{0} = {1}")]
    Parity(usize, u64),
    #[error("lattice scans disagree: naive {naive}, reduced {reduced}")]
    Mismatch { naive: u64, reduced: u64 },
    #[error("total {0} is not divisible by 256")]
    Divisibility(i128),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("sigma_2 did not stabilize by n = {n}: {prev} vs {last}")]
    NoStabilization { n: u32, prev: f64, last: f64 },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("{0} is outside the factorization range")]
    FactorizationRange(u128),
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
