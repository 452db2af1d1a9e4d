use thiserror::Error;

/// Errors raised by the numerical kernels, solvers and scanners.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("{what}: argument {value} is outside the domain ({constraint})")]
    Domain {
        what: &'static str,
        value: String,
        constraint: &'static str,
    },

    /// Evaluation at (or numerically indistinguishable from) the pole s = 1.
    #[error("zeta has a pole at s = 1; refusing to evaluate at s = {value}")]
    Pole { value: String },

    /// A configured size limit would be exceeded.
    #[error("{what}: {value} exceeds the configured maximum {max}")]
    Capacity {
        what: &'static str,
        value: String,
        max: String,
    },

    /// The requested accuracy is not attainable at the given working precision.
    #[error("requested accuracy 2^{requested_log2:.1} is not attainable with {bits} bits")]
    Precision { requested_log2: f64, bits: u32 },

    /// A bracketing method was started on an interval without a sign change.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange {
        lo: String,
        hi: String,
        f_lo: String,
        f_hi: String,
    },

    /// An evaluator produced NaN or an infinity.
    #[error("evaluator returned a non-finite value at x = {at}")]
    NonFinite { at: String },

    /// Invalid configuration (tolerances, step sizes, trial counts, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An internal invariant failed. Indicates a bug or a violated assumption.
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(what: &'static str, value: impl ToString, constraint: &'static str) -> Self {
        Error::Domain {
            what,
            value: value.to_string(),
            constraint,
        }
    }

    pub(crate) fn capacity(what: &'static str, value: impl ToString, max: impl ToString) -> Self {
        Error::Capacity {
            what,
            value: value.to_string(),
            max: max.to_string(),
        }
    }
}
