use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("digit index {0} is below 2; Zeckendorf digits start at F_2")]
    IndexBelowTwo(u64),

    #[error("digit indices {0} and {1} are adjacent")]
    AdjacentDigits(u32, u32),

    #[error("digit indices must be strictly increasing, got {0} after {1}")]
    UnsortedDigits(u32, u32),

    #[error("enumeration depth {requested} exceeds the guard {guard}")]
    EnumerationGuard { requested: usize, guard: usize },

    #[error("tail sum did not pass the Cauchy test at cutoff {cutoff} (last term {last_term:e})")]
    NonConvergentTail { cutoff: u64, last_term: f64 },

    #[error("the set of indices with |f(F_j)| > {threshold} is not finite for this weight family")]
    InfiniteBigWeightSet { threshold: f64 },

    #[error("block {block} has |theta| = {modulus} > 1; reduce |t| or start at a later block")]
    ThetaOutOfRange { block: usize, modulus: f64 },

    #[error("paired product over {blocks} blocks exceeds the supported span {max}")]
    SpanTooLong { blocks: usize, max: usize },

    #[error("characteristic function did not stabilize below {eps:e} within {cap} layers (best gap {gap:e})")]
    NoStabilization { eps: f64, cap: usize, gap: f64 },

    #[error("distribution exceeded the atom cap {cap} at depth {depth}; use a coarser merge tolerance")]
    AtomCap { cap: usize, depth: usize },

    #[error("quadrature did not converge on [{lo}, {hi}] (error estimate {estimate:e})")]
    Quadrature { lo: f64, hi: f64, estimate: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("weight file line {line}: {message}")]
    WeightFile { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
