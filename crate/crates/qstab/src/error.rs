use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum QstabError {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),

    #[error("eigensolver did not converge within the sweep cap")]
    EigNoConvergence,

    #[error("not a physical state: {0}")]
    NotPhysical(String),

    #[error("trajectory diverged: trace drifted to {trace}")]
    TrajectoryDiverged { trace: f64 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("environment usage error: {0}")]
    Usage(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("checkpoint incompatible: {0}")]
    IncompatibleCheckpoint(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
