use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical parameter is outside the domain of the model.
    #[error("domain error: {0}")]
    Domain(String),

    /// A Fock-space truncation cannot hold the requested distribution.
    #[error("truncation error: tail weight {tail:.3e} beyond n_max = {n_max} exceeds {limit:.0e}")]
    Truncation { n_max: usize, tail: f64, limit: f64 },

    /// An iterative solver did not reach its tolerance.
    #[error("not converged: {0}")]
    NotConverged(String),

    /// The Liouvillian has more than one stationary state.
    #[error("ambiguous steady state: null space has dimension {dimension}")]
    AmbiguousSteadyState { dimension: usize },

    /// A structurally invalid input (bad indices, mismatched lengths).
    #[error("malformed input: {0}")]
    Malformed(String),

    /// A constraint that cannot be satisfied in the searched bracket.
    #[error("unreachable: {0}")]
    Unreachable(String),
}

macro_rules! domain {
    ($($arg:tt)*) => {
        $crate::Error::Domain(alloc::format!($($arg)*))
    };
}
pub(crate) use domain;
