use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input violates the precondition of the operation it was passed to.
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    /// `k` lies within the resonance guard of a multiple of π.
    #[error("wavenumber {re}{im:+}i is within the resonance guard of πZ")]
    Resonant { re: f64, im: f64 },

    /// The truncated half-line system is singular (k² is an eigenvalue).
    #[error("half-line system is singular at k = {re}{im:+}i")]
    SingularSystem { re: f64, im: f64 },

    /// `u₀ = 0`: the m-function has a pole at this wavenumber.
    #[error("m-function pole at k = {re}{im:+}i (u₀ vanishes)")]
    MFunctionPole { re: f64, im: f64 },

    /// Index requested outside the stored window of a lattice sequence.
    #[error("index {index} outside stored window [{lo}, {hi}]")]
    OutOfWindow { index: i64, lo: i64, hi: i64 },

    /// A log-series whose terms are not decaying.
    #[error("series diverges: {0}")]
    Divergence(String),

    /// Log-branch continuation met a (near) zero of the tracked function.
    #[error("branch tracking failed near k = {re}{im:+}i")]
    BranchTracking { re: f64, im: f64 },

    /// A quantity that must be positive was not (e.g. Im M at a quadrature node).
    #[error("numerical pathology at {location}: {reason}")]
    Numerical { location: f64, reason: String },

    /// Root search bracket does not enclose all roots.
    #[error("search bound too small: {0}")]
    BracketTooSmall(String),

    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}
