//! Berry connection, curvature, phase and Chern numbers.

mod analytic;
mod chern;
mod cp;
mod numeric;
mod qcheck;

pub use analytic::*;
pub use chern::*;
pub use cp::*;
pub use numeric::*;
pub use qcheck::*;
