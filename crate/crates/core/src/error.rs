//! Error type shared by the simulation modules.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violated its documented range.
    Domain(String),
    /// A matrix expected to be unitary was not (max-abs deviation of U†U from I).
    NonUnitary { deviation: f64 },
    /// Two series were compared on different time grids.
    GridMismatch(String),
    /// More than 1% of the ensemble's trajectories failed.
    TooManyFailures { failed: usize, total: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::NonUnitary { deviation } => {
                write!(f, "matrix is not unitary (deviation {deviation:.3e})")
            }
            Error::GridMismatch(msg) => write!(f, "time-grid mismatch: {msg}"),
            Error::TooManyFailures { failed, total } => {
                write!(f, "{failed} of {total} trajectories failed (> 1% aborts the run)")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
