use crate::poly::BinPoly;

/// Errors raised by the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("instance too large: {0}")]
    SizeLimit(String),

    #[error("modulus {0:#x} is not irreducible")]
    Reducible(BinPoly),

    #[error("degree mismatch: {0:#x} has degree {1}, {2:#x} has degree {3}")]
    DegreeMismatch(BinPoly, i32, BinPoly, i32),

    #[error("no MDS matrix of size {ell} exists over GF(2^{degree}): need 2*{ell} <= 2^{degree}")]
    BoundViolated { ell: usize, degree: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
