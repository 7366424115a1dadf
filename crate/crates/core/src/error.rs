use thiserror::Error;

/// Errors raised by kernel evaluation, series truncation and quadrature.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected n = {expected}, got n = {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("evaluation at the pole (gauge {gauge:e})")]
    Pole { gauge: f64 },

    /// The field point lies on the circular orbit of a (possibly reflected) pole.
    #[error("field point on the pole orbit (hypergeometric argument {arg})")]
    PoleOrbit { arg: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("series did not converge after {terms} terms")]
    NonConvergence { terms: usize },

    #[error("transform depth {depth} exceeds cap {cap}")]
    DepthExceeded { depth: usize, cap: usize },

    /// `|z|` is too small for the normal-derivative operator.
    #[error("characteristic point: |z| = {abs_z:e} below axis tolerance")]
    CharacteristicPoint { abs_z: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Errors that indicate a truncation or quadrature budget was exhausted.
    pub fn is_non_convergence(&self) -> bool {
        matches!(self, Error::NonConvergence { .. })
    }
}
