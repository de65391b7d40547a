//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("gamma pole at nonpositive integer x = {x}")]
    GammaPole { x: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("did not converge: {0}")]
    NonConvergence(String),
    #[error("grid error: {0}")]
    Grid(String),
    #[error("inverse transform produced imaginary residue {residue:.3e} > 1e-9")]
    SymmetryViolation { residue: f64 },
    #[error("format error: {0}")]
    Format(String),
    #[error("projected budget exceeded: {0}")]
    Budget(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
