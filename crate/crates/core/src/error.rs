use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates its documented invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole: evaluation at z = 0")]
    Pole,

    /// A log-space quantity cannot be exponentiated into a finite, normal f64.
    /// The log value is carried so callers can keep working in log form.
    #[error("value out of representable range (natural log = {ln_value})")]
    OutOfRange { ln_value: f64 },

    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),

    /// The input is outside the class a theorem is stated for
    /// (negative coefficient, non-member, multiplier with |b_k| > 1).
    #[error("class precondition failed: {0}")]
    ClassPrecondition(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
