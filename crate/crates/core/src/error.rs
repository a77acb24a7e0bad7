use thiserror::Error;

/// Errors raised by the lattice, instability, propagation, Floquet and
/// spectrum routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("no saddle-point seed converged ({seeds} seeds tried)")]
    NoConvergence { seeds: usize },

    #[error("Newton iterate hit the square-root branch point near q = {re} + {im}i")]
    BranchCut { re: f64, im: f64 },

    #[error("asymptotic analysis needs g > g_th (g = {g}, g_th = {g_th})")]
    OutOfRegime { g: f64, g_th: f64 },

    #[error("lattice of {cells} cells is too small: {reason}")]
    BadSize { cells: usize, reason: String },

    #[error("amplitude overflow at t = {t}: |ψ| = {magnitude:e} exceeds the guard")]
    Overflow { t: f64, magnitude: f64 },

    #[error("non-finite amplitude at t = {t}, cell index {cell}")]
    NonFinite { t: f64, cell: isize },

    #[error("insufficient data for growth fit: {usable} usable samples, need at least {needed}")]
    InsufficientData { usable: usize, needed: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("argument {x} outside the supported Bessel range |x| <= {limit}")]
    RangeError { x: f64, limit: f64 },

    #[error("eigenvalue iteration failed: {0}")]
    EigenFailure(String),

    #[error("eigenpair {index} residual {residual:e} exceeds bound {bound:e}")]
    ResidualTooLarge { index: usize, residual: f64, bound: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::BadSize { .. }
                | Error::DimensionMismatch { .. }
                | Error::RangeError { .. }
                | Error::OutOfRegime { .. }
                | Error::InsufficientData { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
