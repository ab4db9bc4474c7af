//! Q(t): how well the field launched at angle δφ, delayed by t, matches the
//! field launched at angle 0. The delay that maximizes Q measures the
//! incremental Berry phase.

use nalgebra::Vector3;
use serde::Serialize;

use super::analytic::connection_tm_analytic;
use crate::bulk::{tm_effective_eps, tm_envelope};
use crate::consts::C0;
use crate::media::PlasmaParams;
use crate::roots::golden_max;
use crate::{Error, Result, C64};

use std::f64::consts::PI;

const SAMPLES_PER_WAVELENGTH: usize = 16;

fn on_shell_k(p: &PlasmaParams, omega: f64) -> Result<f64> {
    let e = tm_effective_eps(p, omega)?;
    if !(e > 0.0) {
        return Err(Error::EvanescentBranch("eps_eff ≤ 0: no propagating TM mode"));
    }
    Ok(e.sqrt() * omega / C0)
}

fn e_env(p: &PlasmaParams, k: f64, phi: f64, omega: f64) -> Result<Vector3<C64>> {
    Ok(tm_envelope(p, [k * phi.cos(), k * phi.sin()], omega)?.e)
}

fn real_field(e: &Vector3<C64>, phase: f64) -> Vector3<f64> {
    let z = C64::from_polar(1.0, phase);
    e.map(|x| (x * z).re)
}

/// Correlation of the real fields E(r', 0, 0) and E(r', δφ, t), averaged over
/// r' in one wavelength from r and normalized so that Q(0) = 1 at δφ = 0.
pub fn q_similarity(p: &PlasmaParams, omega: f64, delta_phi: f64, t: f64, r: f64) -> Result<f64> {
    let k = on_shell_k(p, omega)?;
    let (e1, e2) = (e_env(p, k, 0.0, omega)?, e_env(p, k, delta_phi, omega)?);
    let lambda = 2.0 * PI / k;
    let (mut cross, mut n1, mut n2) = (0.0, 0.0, 0.0);
    for j in 0..SAMPLES_PER_WAVELENGTH {
        let rr = r + lambda * j as f64 / SAMPLES_PER_WAVELENGTH as f64;
        let a = real_field(&e1, k * rr);
        let b = real_field(&e2, k * rr - omega * t);
        cross += a.dot(&b);
        n1 += a.norm_squared();
        n2 += b.norm_squared();
    }
    Ok(cross / (n1 * n2).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QPeak {
    pub delta_phi: f64,
    /// ωt at the maximum of Q.
    pub omega_t: f64,
    pub q_max: f64,
    /// A_φ k δφ from the closed-form connection.
    pub incremental_phase: f64,
}

/// Scans ωt over (−π, π] and refines the best sample by golden section.
pub fn q_peak(p: &PlasmaParams, omega: f64, delta_phi: f64) -> Result<QPeak> {
    let k = on_shell_k(p, omega)?;
    let q = |wt: f64| q_similarity(p, omega, delta_phi, wt / omega, 0.0);
    let n = 4000;
    let step = 2.0 * PI / n as f64;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for j in 0..n {
        let wt = -PI + step * (j + 1) as f64;
        let v = q(wt)?;
        if v > best.0 {
            best = (v, wt);
        }
    }
    let wt = golden_max(|x| q(x).unwrap_or(f64::NEG_INFINITY), best.1 - step, best.1 + step, 1e-9);
    let a = connection_tm_analytic(p, [k, 0.0], omega)?;
    Ok(QPeak { delta_phi, omega_t: wt, q_max: q(wt)?, incremental_phase: a[1] * k * delta_phi })
}
