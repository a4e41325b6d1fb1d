use thiserror::Error;

/// Errors raised by the kernel. The CLI maps them to exit code 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("reducible defining polynomial, nontrivial factor {0}")]
    Reducible(String),
    #[error("invalid endomorphism: {0}")]
    InvalidEndomorphism(String),
    #[error("mixed base fields")]
    MixedFields,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("restricted automation: {0}")]
    RestrictedAutomation(String),
    #[error("zero ring")]
    ZeroRing,
    #[error("incompatible sigma: {0}")]
    Compatibility(String),
    #[error("inconsistent dynamics: {0}")]
    InconsistentDynamics(String),
    #[error("not Galois: {0}")]
    NotGalois(String),
    #[error("trivial extension: {0}")]
    Trivial(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
