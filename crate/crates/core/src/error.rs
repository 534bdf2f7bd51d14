use thiserror::Error;

/// Every fallible operation in the crate returns this error.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("norm specification: {0}")]
    NormSpec(String),
    #[error("vacuum guard tripped: eps*max|a| = {0:.6}")]
    Vacuum(f64),
    #[error("CFL violated: dt = {dt:.3e} exceeds limit {limit:.3e}")]
    Cfl { dt: f64, limit: f64 },
    #[error("invariant failed: {0}")]
    Invariant(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Vacuum(_) | Error::Cfl { .. } => 3,
            Error::Invariant(_) | Error::NonFinite(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
