use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The target value is not enclosed by `f(lo)` and `f(hi)`.
    #[error("target {target} not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    BracketInvalid {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
        target: f64,
    },

    #[error("no upper bracket for target {target} after {iterations} expansions")]
    NoBracket { target: f64, iterations: usize },

    #[error("{what} did not converge within {limit} steps")]
    NoConvergence { what: &'static str, limit: usize },

    #[error("domain error: {0}")]
    Domain(String),

    /// A Pareto tail exponent is too small for the tail expectation to exist.
    #[error("tail expectation diverges: exponent {exponent} <= 1")]
    DivergentTail { exponent: f64 },

    #[error("singular parameters: {0}")]
    SingularParameters(String),

    #[error("only {count} observations above VaR, need at least {required}")]
    LowTailCount { count: usize, required: usize },

    #[error("unsupported combination: {0}")]
    Unsupported(String),
}

impl Error {
    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::BracketInvalid { .. } => "bracket_invalid",
            Error::NoBracket { .. } => "no_bracket",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Domain(_) => "domain_error",
            Error::DivergentTail { .. } => "divergent_tail",
            Error::SingularParameters(_) => "singular_parameters",
            Error::LowTailCount { .. } => "low_tail_count",
            Error::Unsupported(_) => "unsupported",
        }
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
