//! Crate-wide error type and the CLI exit-code mapping.

/// Errors surfaced by geometry validation, the elasticity solver,
/// configuration parsing, and the validation suites.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid geometric data: profile construction or admissibility.
    #[error("geometry: {0}")]
    Geometry(String),

    /// Invalid dislocation data: dependent fundamentals, malformed measure.
    #[error("dislocations: {0}")]
    Dislocation(String),

    /// Mesh construction failure (degenerate profile, resolution too coarse).
    #[error("mesh: {0}")]
    Mesh(String),

    /// Iterative linear solver failed to reach the requested residual.
    #[error("solver stalled: relative residual {residual:.3e} after {iterations} iterations")]
    Solver { residual: f64, iterations: usize },

    /// Elasticity preconditions violated (profile has cuts, film too thin).
    #[error("elasticity: {0}")]
    Elasticity(String),

    /// Configuration file problem, addressed by line number.
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    /// A required configuration field is missing.
    #[error("config: missing required field `{0}`")]
    MissingField(String),

    /// Root enumeration mismatch between Newton seeding and winding count.
    #[error("enumeration: {0}")]
    Enumeration(String),

    /// Oracle check failed, or a brute-force space is too large to enumerate.
    #[error("validation: {0}")]
    Validation(String),

    /// Underlying I/O failure.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for configuration problems,
    /// 3 for validation failures, 1 for every other runtime failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::MissingField(_) => 2,
            Error::Validation(_) => 3,
            _ => 1,
        }
    }
}
