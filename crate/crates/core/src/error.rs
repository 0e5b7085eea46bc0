use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("state-space cap exceeded: requested {requested}, cap {cap}")]
    CapExceeded { requested: usize, cap: usize },

    #[error("enumeration guard exceeded: {count} matrices > {limit}")]
    GuardExceeded { count: u128, limit: u128 },

    #[error("{what} did not converge: achieved error {achieved:e} > tolerance {tol:e}")]
    NonConvergence {
        what: &'static str,
        achieved: f64,
        tol: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
