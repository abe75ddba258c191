pub mod cli;
pub mod error;
pub mod expansions;
pub mod numeric;
pub mod quadrature;
pub mod series;
pub mod specfun;
pub mod zeros;

pub use error::{Error, Result};
