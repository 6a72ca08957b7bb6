use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("{what} violates its symmetry requirement (relative deviation {deviation:.3e})")]
    Asymmetric { what: &'static str, deviation: f64 },

    #[error("blocks do not form a canonical map (deviation {deviation:.3e})")]
    NotCanonical { deviation: f64 },

    #[error("matrix exponential did not converge (1-norm {norm:e})")]
    ExpmNonConvergence { norm: f64 },

    #[error("{0} is undefined for a zero-norm phase vector")]
    ZeroNorm(&'static str),

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("Fock space dimension {dim} exceeds limit {limit}")]
    DimensionLimit { dim: usize, limit: usize },

    #[error("truncation guard: tail mass {tail_mass:.3e} exceeds {limit:.1e}")]
    TruncationGuard { tail_mass: f64, limit: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Errors raised by numerical safeguards rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::ExpmNonConvergence { .. } | Error::TruncationGuard { .. } | Error::NotCanonical { .. })
    }
}
