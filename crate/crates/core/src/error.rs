use thiserror::Error;

/// Errors raised by the library. Numerical failures that are part of the
/// normal answer (a value outside the image, a forbidden coordinate) are
/// reported as values where the API allows it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parameter ordering violated: {0}")]
    Ordering(String),
    #[error("argument coincides with pole c{index}")]
    Pole { index: usize },
    #[error("coordinate {coordinate} outside its interval: {detail}")]
    Interval { coordinate: usize, detail: String },
    #[error("value not in the momentum-map image: {0}")]
    NotInImage(String),
    #[error("value is {distance:e} away from the bifurcation set")]
    OffBifurcationSet { distance: f64 },
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("unsupported for this family: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
