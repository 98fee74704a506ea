use alloc::string::String;

/// Errors reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Operand dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The two components of a cat cancel so the superposition has no norm.
    #[error("degenerate superposition: squared normalization {norm_sqr:e} is below 1e-14")]
    DegenerateSuperposition { norm_sqr: f64 },

    /// A quadrature grid is too coarse for the requested polynomial degree.
    #[error("grid {n_theta}x{n_phi} too coarse: need at least {min_theta}x{min_phi}")]
    Resolution {
        n_theta: usize,
        n_phi: usize,
        min_theta: usize,
        min_phi: usize,
    },

    /// Two fields live on different grids or belong to different spins.
    #[error("fields are defined on different grids")]
    GridMismatch,

    /// A density matrix or state failed validation.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A precondition about the structure of the input does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Squeezing cannot occur for a single atom.
    #[error("a single atom (j = 1/2) never shows squeezing")]
    NoSqueezing,

    /// The adaptive integrator could not maintain the requested accuracy.
    #[error("step size underflow at t = {t:e}: smallest step {step:e}")]
    Stiffness { t: f64, step: f64 },

    /// The evolution horizon ends before the requested event occurs.
    #[error("horizon {horizon} too short: {what} not reached")]
    InsufficientHorizon { horizon: f64, what: &'static str },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
