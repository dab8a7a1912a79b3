use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("fractional order {0} is outside (0, 1]")]
    InvalidOrder(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("window {window:?} does not contain the disk of radius {radius}")]
    WindowTooSmall { window: [f64; 4], radius: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state at index {0} has zero norm; cannot take its logarithm")]
    ZeroStateInWindow(usize),

    #[error("seed {0:?} does not fall on a member pixel")]
    SeedNotMember((f64, f64)),

    #[error("main body is empty; no member pixel is connected to the seed")]
    EmptyMainBody,
}

pub(crate) fn check_order(q: f64) -> Result<()> {
    if q > 0.0 && q <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidOrder(q))
    }
}
