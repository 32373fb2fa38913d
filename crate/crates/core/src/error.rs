use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid coefficient table: {0}")]
    Validation(String),

    #[error("polynomial is not strictly positive off the origin (min {min:e} over {samples} samples)")]
    Degenerate { min: f64, samples: usize },

    #[error("point is not inside the domain (defining function = {value:e})")]
    OutsideDomain { value: f64 },

    #[error("gradient of the defining function vanishes (|grad| = {norm:e})")]
    VanishingGradient { norm: f64 },

    #[error("automorphism parameter must satisfy |a| < 1, got |a| = {0}")]
    Parameter(f64),

    #[error("no level crossing found within search radius {cap:e}")]
    Unbounded { cap: f64 },

    #[error("optimizer did not converge: {0}")]
    NonConvergence(String),

    #[error("embedding chain sends its basepoint to |f(p)| = {norm:e}, expected 0")]
    Basepoint { norm: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
