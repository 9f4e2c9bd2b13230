use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The null space of the Liouvillian is not one-dimensional (or the
    /// trace-constrained solve left a residual above tolerance).
    #[error("degenerate steady state: {0}")]
    DegenerateSteadyState(String),

    #[error("sparse solver failed: {0}")]
    Solver(String),

    #[error("time integration failed: {0}")]
    Integration(String),

    /// Fock-space truncation loop hit its ceiling without the phonon
    /// number settling. Carries the n_ss values seen along the way.
    #[error("no truncation convergence by fock_dim {fock_dim_max}; n_ss sequence {sequence:?}")]
    TruncationNotConverged {
        fock_dim_max: usize,
        sequence: Vec<f64>,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("undefined formula: {0}")]
    UndefinedFormula(String),

    #[error("numerical check failed: {0}")]
    Numerical(String),
}
