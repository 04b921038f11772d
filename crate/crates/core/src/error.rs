use thiserror::Error;

/// Failure modes shared by every solver in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("convergence failure in {what} (best residual {residual:.3e})")]
    Convergence { what: String, residual: f64 },
    #[error("supercritical: {0}")]
    Supercritical(String),
    #[error("singular evaluation: {0}")]
    Singular(String),
    #[error("integration failure: {0}")]
    Integration(String),
    #[error("no solution bracketed: {0}")]
    NoSolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
