//! Berry connection, curvature, phase and Chern numbers for continuum
//! electromagnetic media, computed from the 6x6 Maxwell eigenproblem.
//!
//! SI units throughout: ω in rad/s, k in rad/m. Fields carry e^{−iωt} and
//! e^{+ik·r}.

pub mod berry;
pub mod bulk;
pub mod consts;
pub mod edge;
pub mod em;
pub mod emitter;
mod error;
pub mod media;
pub mod roots;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
