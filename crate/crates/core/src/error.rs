use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point x = {0} lies outside [0, π]")]
    OutOfDomain(f64),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("potential is not smooth enough: {0}")]
    InsufficientSmoothness(String),

    #[error("sequence lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("integrator failed at x = {x}: {reason}")]
    Integrator { x: f64, reason: String },

    #[error("admissibility condition violated: Υ(ρ) = {upsilon:.3e} is not below {bound:.3e}")]
    Inadmissible { upsilon: f64, bound: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NotConverged { what: &'static str, iterations: usize },

    #[error("no bracket found for eigenvalue {index}: {reason}")]
    BracketNotFound { index: usize, reason: String },

    #[error("eigenvalues {0} and {1} coincide to working precision")]
    DuplicateRoot(usize, usize),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("eigenfunction norm is too small ({0:.3e}); eigenvalue is degenerate or nearly so")]
    NearDegenerate(f64),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
