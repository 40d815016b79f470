//! Error type shared by every module in the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible range (bad `mu`, empty bracket,
    /// zero grid, ...). These are caller mistakes, not numerical failures.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A point was handed to a view that does not contain it, beyond the
    /// rounding slack the view tolerates.
    #[error("x = {x} outside view domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },

    /// The value at `x` is not attained on the opposite branch of the view,
    /// so `x` has no symmetric partner.
    #[error("no symmetric point for x = {x}")]
    NoSymmetricPoint { x: f64 },

    /// A bisection was asked to start from endpoints with equal signs.
    #[error("no sign change over [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    /// A search (orbit, window, crisis, witness) exhausted its bracket or
    /// budget without locating the object.
    #[error("not found: {0}")]
    NotFound(String),

    /// A cyclic trapping region could not be constructed or failed its
    /// containment checks.
    #[error("trapping region: {0}")]
    Region(String),

    /// The tower builder hit an inconsistency between levels (an invariant
    /// that should hold analytically failed numerically).
    #[error("tower level {level}: {reason}")]
    Tower { level: usize, reason: String },

    /// An explicit work or memory budget was exceeded.
    #[error("resource limit: {0}")]
    Resource(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
