//! Physical constants (CODATA 2018) and unit helpers.

use std::f64::consts::PI;

pub const EPS0: f64 = 8.8541878128e-12;
pub const MU0: f64 = 1.25663706212e-6;
pub const C0: f64 = 299_792_458.0;
/// Electron charge, signed.
pub const Q_E: f64 = -1.602176634e-19;
pub const M_E: f64 = 9.1093837015e-31;

pub fn eta0() -> f64 {
    (MU0 / EPS0).sqrt()
}

/// Cyclic THz to rad/s.
pub fn thz(f: f64) -> f64 {
    2.0 * PI * 1e12 * f
}

pub fn to_thz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e12)
}

/// Signed cyclotron frequency ω_c = (q_e/m_e) B_z.
pub fn cyclotron_from_bz(b_tesla: f64) -> f64 {
    Q_E / M_E * b_tesla
}
