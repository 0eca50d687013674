use thiserror::Error;

/// Errors raised by the evaluators, the witness machinery and the verifier.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("q must lie strictly inside (0, 1), got {0}")]
    InvalidQ(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("product did not certify within {0} factors (|a| too large for the certificate)")]
    NonConvergent(usize),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error("degree {0} exceeds the direct-sum domain (n <= {1}); use a normalized form")]
    DomainTooLarge(usize, usize),
    #[error("peak term exponent {0:.1} exceeds double range")]
    PeakOverflow(f64),
    #[error("tau = {0} is outside (-2, 0)")]
    BadTau(f64),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("value is not an exact rational: {0}")]
    NotRational(String),
    #[error("unsupported scaling: {0}")]
    UnsupportedScaling(String),
    #[error("missing parameter `{0}` for case {1}")]
    MissingParam(&'static str, u8),
    #[error("no admissible indices supplied")]
    EmptyCandidates,
}

pub type Result<T> = std::result::Result<T, Error>;
