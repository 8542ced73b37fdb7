use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("invalid system parameters: {0}")]
    InvalidSpec(String),

    #[error("operation requires coupling kind {expected}, got {found}")]
    WrongCouplingKind { expected: String, found: String },

    #[error("not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("degenerate steady state: {0}")]
    DegenerateSteadyState(String),

    #[error("steady-state solver failed (residual {residual:.3e}): {reason}")]
    SolverFailure { residual: f64, reason: String },

    #[error("state is not stationary: residual {0:.3e}")]
    NotStationary(f64),

    #[error("correlation window too short: |g(tau_max)|/|g(0)| = {0:.3e}")]
    WindowTooShort(f64),

    #[error("near-singular resolvent at omega = {0}")]
    SingularResolvent(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("zero amplitude: phase equations are singular")]
    SingularState,

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
