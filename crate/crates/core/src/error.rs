use thiserror::Error;

use crate::algebra::Degree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("operation not supported for this algebra: {0}")]
    UnsupportedVariant(String),

    #[error("invalid scalar field: {0}")]
    InvalidField(String),

    #[error("interior bound {interior} must be smaller than the window bound {window}")]
    InvalidInterior { interior: u32, window: u32 },

    #[error("shift {0} is not a multiple of t in both coordinates")]
    InvalidShift(Degree),

    #[error("center vector {0} does not lie in the central lattice")]
    InvalidCenterVector(Degree),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
