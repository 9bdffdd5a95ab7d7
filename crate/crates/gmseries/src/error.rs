use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("x = {x} lies within {radius:e} of the singular set 2πℤ/{r}")]
    SingularPoint { x: f64, r: u64, radius: f64 },
    #[error("horizon {horizon} is too small: {reason}")]
    HorizonTooSmall { horizon: u64, reason: &'static str },
    #[error("b6 maximum for n = {n} is attained at the horizon boundary m = {m}")]
    BetaAtBoundary { n: u64, m: u64 },
    #[error("variation tail from index {from} is not summable, no tail certificate")]
    NoTailCertificate { from: u64 },
    #[error("series is not summable beyond index {from}")]
    NotSummable { from: u64 },
    #[error("quadrature did not reach tolerance {tol:e} within {panels} panels (estimate {estimate:e})")]
    QuadratureFailed { tol: f64, panels: usize, estimate: f64 },
    #[error("integrand has singular points but provides no envelope for the excluded neighbourhoods")]
    MissingEnvelope,
    #[error("every tested point has a zero denominator")]
    ZeroDenominator,
    #[error("grid must be nonempty and strictly ascending with positive entries")]
    InvalidGrid,
    #[error("{0} cannot be serialized")]
    NotSerializable(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
