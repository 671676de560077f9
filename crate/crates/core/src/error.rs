use thiserror::Error;

/// Errors surfaced by the exact arithmetic layer and the experiment drivers.
///
/// The taxonomy is deliberately coarse: callers mostly need to distinguish
/// "the input cannot be computed with" (parse, precision, parameter errors)
/// from "the computation ran and an invariant did not hold" (which is reported
/// in the result types, not as an `Err`).
#[derive(Debug, Error)]
pub enum Error {
    /// A real or complex literal did not match the accepted grammar.
    #[error("parse error: {0}")]
    Parse(String),

    /// A decimal input does not carry enough digits to certify the requested
    /// quantity. Never silently rounded.
    #[error("precision horizon exceeded: {0}")]
    PrecisionExceeded(String),

    /// Two quadratic surds with different radicands were combined.
    #[error("incompatible surd bases: √{0} vs √{1}")]
    IncompatibleSurds(String, String),

    /// An operation that requires an irrational ratio was given a rational one.
    #[error("alpha/beta is rational ({0}); construction requires an irrational ratio")]
    RationalRatio(String),

    /// A brute-force verification range exceeds the configured cap.
    #[error("verification range {required} exceeds configured cap {cap}")]
    CapExceeded { required: u64, cap: u64 },

    /// Evaluation hit a zero (or underflow) of a denominator polynomial.
    #[error("division singularity: {0}")]
    Singularity(String),

    /// A parameter is outside the domain the operation supports.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Four points that fit none of the supported configuration shapes.
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    /// A sample-selection loop exhausted its budget without an admissible point.
    #[error("no admissible sample within budget {budget}: {context}")]
    NoAdmissibleSample { budget: u64, context: String },
}

pub type Result<T> = std::result::Result<T, Error>;
