pub mod algebra;
pub mod cli;
pub mod error;
pub mod halfderiv;
pub mod linalg;
mod par;
pub mod scalars;
pub mod tpa;

pub use error::{Error, Result};
