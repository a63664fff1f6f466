use thiserror::Error;

/// Errors raised by the simulation and inference layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The input is well-formed but the requested quantity is undefined for it.
    #[error("undefined input: {0}")]
    Undefined(String),
    /// A matrix failed the density-operator checks.
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    /// An iterative fit gave up.
    #[error("fit failed: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

/// Checks that `p` is a probability, naming it in the error.
pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if p.is_finite() && (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        domain(format!("{name} = {p} is not a probability in [0, 1]"))
    }
}
