pub mod algebra;
pub mod coalgebra;
pub mod error;
pub mod examples;
pub mod formal;
pub mod lattice;
pub mod report;

pub use error::{Error, Result};
