use thiserror::Error;

use crate::atomic::Sublevel;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sublevel {0} is outside the enumerated state space")]
    UnknownSublevel(Sublevel),
    #[error("expected a {expected} sublevel, got {got}")]
    WrongManifold {
        expected: &'static str,
        got: Sublevel,
    },
    #[error(
        "transition F={ground} -> F'={excited} is not in the state space or not dipole allowed"
    )]
    UnknownTransition { ground: i32, excited: i32 },
    #[error("Raman line index |m|={0} exceeds 3")]
    RamanLineOutOfRange(i32),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("unstable step: dt*max|R| = {product:.3e} exceeds {limit}")]
    UnstableStep { product: f64, limit: f64 },
    #[error("invalid data: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
