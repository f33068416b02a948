use crate::numerics::EigenPairs;
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-side contract was violated (invalid domain, dimension
    /// mismatch, index out of range, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An iterative solver ran out of iterations. The best iterate found so
    /// far is attached so the caller can decide what to do with it.
    #[error("no convergence: {message}")]
    Convergence {
        message: String,
        best: Option<EigenPairs>,
    },

    /// Orbital occupations would be ambiguous: the gap between the highest
    /// occupied and lowest unoccupied orbital vanishes.
    #[error("degenerate frontier orbitals: homo = {homo:.12e}, lumo = {lumo:.12e}")]
    AufbauDegeneracy { homo: f64, lumo: f64 },

    /// A full many-body space of 4^l states would be too large to build.
    #[error("{l} sites would need a 4^{l}-dimensional space (limit 4^{max}); use the dmrg module instead")]
    DimensionGuard { l: usize, max: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Process exit code for the CLI: 2 for configuration/input problems,
    /// 3 for convergence failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Convergence { .. } | Error::AufbauDegeneracy { .. } => 3,
            _ => 2,
        }
    }
}
