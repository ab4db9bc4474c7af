//! Closed forms for the TM band of the local biased plasma.

use crate::bulk::tm_residual;
use crate::consts::{C0, EPS0, MU0};
use crate::em::c;
use crate::media::PlasmaParams;
use crate::{Error, Result, C64};

/// Intermediate symbols of the TM connection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TmSymbols {
    pub alpha11: C64,
    pub alpha12: C64,
    pub beta11: C64,
    pub beta12: C64,
    pub nx: C64,
    pub ny: C64,
    pub d: f64,
}

pub fn tm_symbols(p: &PlasmaParams, k: [f64; 2], omega: f64) -> Result<TmSymbols> {
    let g = p.gyro(omega)?;
    let dg = p.gyro_derivative(omega)?;
    let delta = g.e11 * g.e11 - g.e12 * g.e12;
    if delta.abs() <= 1e-14 * (g.e11 * g.e11 + g.e12 * g.e12) || delta == 0.0 {
        return Err(Error::DegenerateDenominator("eps11^2 = eps12^2"));
    }
    let i = C64::i();
    let a11 = c(g.e11 / delta);
    let a12 = -i * g.e12 / delta;
    let b11 = c(EPS0 * dg.e11);
    let b12 = i * (EPS0 * dg.e12);
    let [kx, ky] = k;
    let s = a11.norm_sqr() + a12.norm_sqr();
    let pre = i / (EPS0 * omega).powi(2);
    let nx = pre * (c(-2.0) * a11 * a12 * (b12 * kx + b11 * ky) + (b11 * kx - b12 * ky) * s);
    let ny = pre * (c(2.0) * a11 * a12 * (b11 * kx - b12 * ky) + (b12 * kx + b11 * ky) * s);
    let k2 = kx * kx + ky * ky;
    let d = (c(k2 / (EPS0 * omega).powi(2)) * (b11 * s - c(2.0) * a11 * a12 * b12)).re + MU0;
    if !(d.abs() > 0.0) || !d.is_finite() {
        return Err(Error::DegenerateDenominator("D = 0"));
    }
    Ok(TmSymbols { alpha11: a11, alpha12: a12, beta11: b11, beta12: b12, nx, ny, d })
}

/// A = Re{N_x x̂ + N_y ŷ}/D.
pub fn connection_tm_analytic(p: &PlasmaParams, k: [f64; 2], omega: f64) -> Result<[f64; 2]> {
    let s = tm_symbols(p, k, omega)?;
    Ok([s.nx.re / s.d, s.ny.re / s.d])
}

/// The curl of A with ω and D held fixed:
/// Re{i(4 α11 α12 β11 + 2(|α11|² + |α12|²) β12)} / (D (ε0 ω)²).
/// It misses the slope of the band; see [`curvature_tm_analytic`].
pub fn curvature_tm_frozen(p: &PlasmaParams, k: [f64; 2], omega: f64) -> Result<f64> {
    let s = tm_symbols(p, k, omega)?;
    let sum = s.alpha11.norm_sqr() + s.alpha12.norm_sqr();
    let inner = c(4.0) * s.alpha11 * s.alpha12 * s.beta11 + c(2.0) * s.beta12 * sum;
    Ok((C64::i() * inner).re / (s.d * (EPS0 * omega).powi(2)))
}

/// g in A = g(|k|)(−k_y, k_x), written with real symbols only so that it
/// continues analytically to complex (k, ω).
fn g_holomorphic(p: &PlasmaParams, k: C64, omega: C64) -> C64 {
    let (wp2, wc) = (p.omega_p * p.omega_p, p.omega_c);
    let dd = omega * omega - wc * wc;
    let e11 = c(1.0) - wp2 / dd;
    let e12 = -wc * wp2 / (omega * dd);
    let delta = e11 * e11 - e12 * e12;
    let a11 = e11 / delta;
    let a = -e12 / delta;
    let b11 = (c(1.0) + wp2 * (omega * omega + wc * wc) / (dd * dd)) * EPS0;
    let b = omega * (2.0 * wc * wp2 * EPS0) / (dd * dd);
    let s = a11 * a11 + a * a;
    let eo2 = (omega * EPS0) * (omega * EPS0);
    let d = k * k / eo2 * (s * b11 + c(2.0) * a11 * a * b) + MU0;
    -(c(2.0) * a11 * a * b11 + s * b) / (eo2 * d)
}

/// dω/d|k| on the local TM band through (k, ω).
pub fn tm_band_slope(p: &PlasmaParams, k: f64, omega: f64) -> f64 {
    let wc2 = p.omega_c * p.omega_c;
    let u = omega * omega - wc2 - p.omega_p * p.omega_p;
    let ck2 = C0 * C0 * k * k;
    2.0 * C0 * C0 * k * u / ((2.0 * u + wc2 - ck2) * 2.0 * omega)
}

/// F_z = (1/k) d(k² g)/dk = 2g + k dg/dk along the band through (k, ω).
/// The band derivative is taken by complex step, exact to rounding.
pub fn curvature_tm_analytic(p: &PlasmaParams, k: [f64; 2], omega: f64) -> Result<f64> {
    let frozen = curvature_tm_frozen(p, k, omega)?;
    let km = k[0].hypot(k[1]);
    if km == 0.0 {
        return Ok(frozen);
    }
    let res = tm_residual(&p.gyro(omega)?, omega, km);
    if res > 1e-8 {
        return Err(Error::InvalidInput(format!("(k, omega) is off the TM band (relative residual {res:e})")));
    }
    let slope = tm_band_slope(p, km, omega);
    let h = km * 1e-20;
    let gk = g_holomorphic(p, C64::new(km, h), C64::new(omega, h * slope));
    Ok(frozen + km * gk.im / h)
}

/// g(|k|) of the connection, for callers that want the radial profile.
pub fn tm_connection_g(p: &PlasmaParams, k: f64, omega: f64) -> f64 {
    g_holomorphic(p, c(k), c(omega)).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bulk::{solve_bulk_band, tm_effective_eps, tm_envelope, BandLabel, Polarization};
    use crate::consts::thz;
    use crate::em::{inner_product, MaterialModel};
    use crate::media::Medium;
    use approx::assert_relative_eq;
    use nalgebra::Vector3;

    fn fig_e1() -> (PlasmaParams, f64) {
        (PlasmaParams::new(thz(9.0), thz(1.73)).unwrap(), thz(10.0))
    }

    #[test]
    fn unbiased_vanishes() {
        let p = PlasmaParams::new(thz(9.0), 0.0).unwrap();
        let w = thz(10.0);
        let k = tm_effective_eps(&p, w).unwrap().sqrt() * w / C0;
        assert_eq!(connection_tm_analytic(&p, [k, 0.3 * k], w).unwrap(), [0.0, 0.0]);
        assert_eq!(curvature_tm_frozen(&p, [k, 0.0], w).unwrap(), 0.0);
    }

    #[test]
    fn azimuthal_and_g_consistent() {
        let (p, w) = fig_e1();
        let k = tm_effective_eps(&p, w).unwrap().sqrt() * w / C0;
        for phi in [0.1f64, 1.0, 2.0, 4.0] {
            let kv = [k * phi.cos(), k * phi.sin()];
            let a = connection_tm_analytic(&p, kv, w).unwrap();
            assert!((a[0] * kv[0] + a[1] * kv[1]).abs() <= 1e-12 * (a[0].hypot(a[1]) * k));
            let g = tm_connection_g(&p, k, w);
            assert_relative_eq!(a[0], -g * kv[1], max_relative = 1e-12);
            assert_relative_eq!(a[1], g * kv[0], max_relative = 1e-12);
            assert_relative_eq!(curvature_tm_frozen(&p, kv, w).unwrap(), 2.0 * g, max_relative = 1e-12);
        }
    }

    #[test]
    fn d_is_the_energy_norm() {
        let (p, w) = fig_e1();
        let k = tm_effective_eps(&p, w).unwrap().sqrt() * w / C0;
        let kv = [0.6 * k, 0.8 * k];
        let f = tm_envelope(&p, kv, w).unwrap();
        let wt = Medium::Plasma(p).weight_analytic(w, &Vector3::new(kv[0], kv[1], 0.0)).unwrap().unwrap();
        let s = tm_symbols(&p, kv, w).unwrap();
        assert_relative_eq!(inner_product(&f, &f, &wt).re, s.d, max_relative = 1e-12);
    }

    #[test]
    fn incremental_phase_of_the_experiment() {
        // A_φ k δφ at 1°: magnitude 0.01717 rad
        let (p, w) = fig_e1();
        let k = tm_effective_eps(&p, w).unwrap().sqrt() * w / C0;
        let a = connection_tm_analytic(&p, [k, 0.0], w).unwrap();
        let dg = a[1] * k * 1f64.to_radians();
        assert_relative_eq!(dg, -0.017_170, max_relative = 1e-3);
    }

    #[test]
    fn full_curvature_is_curl_of_connection() {
        // central-difference curl of A along the band, as an independent check
        let p = PlasmaParams::new(1.0e13, 0.2e13).unwrap();
        let m = Medium::Plasma(p);
        for band in [BandLabel::Lower, BandLabel::Upper] {
            for kn in [0.3, 1.0, 3.0] {
                let k = kn * p.omega_p / C0;
                let w = solve_bulk_band(&m, k, band, Polarization::TM).unwrap().omega;
                let h = 1e-5 * k;
                let gk = |kk: f64| {
                    let ww = solve_bulk_band(&m, kk, band, Polarization::TM).unwrap().omega;
                    kk * kk * tm_connection_g(&p, kk, ww)
                };
                let want = (gk(k + h) - gk(k - h)) / (2.0 * h) / k;
                let got = curvature_tm_analytic(&p, [k, 0.0], w).unwrap();
                assert_relative_eq!(got, want, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn off_band_rejected() {
        let p = PlasmaParams::new(1.0e13, 0.2e13).unwrap();
        assert!(curvature_tm_analytic(&p, [1e5, 0.0], 1.5e13).is_err());
    }
}
