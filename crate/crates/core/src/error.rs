use thiserror::Error;

/// Errors raised by the model, the special functions and the evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The network configuration or an evaluator argument is invalid.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An argument lies outside the domain the routine supports.
    #[error("domain error in {func}: {reason}")]
    Domain { func: &'static str, reason: String },

    /// The result is not representable as a finite `f64`.
    #[error("overflow in {func} at argument {arg}")]
    Overflow { func: &'static str, arg: f64 },

    /// A series or adaptive scheme hit its iteration cap before converging.
    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },
}

impl Error {
    pub(crate) fn domain(func: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            func,
            reason: reason.into(),
        }
    }

    /// True when the error reflects a numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Overflow { .. } | Error::NonConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
