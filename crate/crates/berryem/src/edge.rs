//! TM surface plasmon-polaritons on the interface y = 0 between a simple
//! medium ε_s (y > 0) and the biased plasma (y < 0), propagating along x.

use rayon::prelude::*;
use serde::Serialize;

use crate::bulk::tm_gap;
use crate::consts::{C0, EPS0};
use crate::media::{Gyro, Medium, PlasmaParams};
use crate::roots::{bisect, lin_grid, log_grid, sign_changes};
use crate::{Error, Result, C64};

/// ε_s used as a stand-in for a perfect conductor.
pub const PEC_EPS: f64 = -1e9;
/// Scan points per propagation direction.
pub const SCAN_POINTS: usize = 10_000;
/// Scan range of |k_spp|/k0.
pub const SCAN_MAX: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// +x
    Forward,
    /// −x
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SppSolution {
    pub omega: f64,
    pub k_spp: f64,
    /// Infinite for the closed-form conductor limit.
    pub alpha_s: f64,
    pub alpha_p: f64,
    /// −∞ for the closed-form conductor limit.
    pub eps_s: f64,
    pub plasma: PlasmaParams,
    pub residual: f64,
    /// ε_s > 0: the surface wave would radiate at any discontinuity.
    pub radiative: bool,
}

struct Terms {
    e11: f64,
    e12: f64,
    eps_eff: f64,
    k0: f64,
}

fn terms(p: &PlasmaParams, omega: f64) -> Result<Terms> {
    let Gyro { e11, e12, .. } = p.gyro(omega)?;
    if e11.abs() <= 1e-14 {
        return Err(Error::DivisionByZero("eps11 = 0"));
    }
    let eps_eff = (e11 * e11 - e12 * e12) / e11;
    if eps_eff.abs() <= 1e-14 {
        return Err(Error::DivisionByZero("eps_eff = 0"));
    }
    Ok(Terms { e11, e12, eps_eff, k0: omega / C0 })
}

/// k0 √(q² − ε) on the proper sheet, q = k/k0.
fn decay(k0: f64, q: f64, eps: f64) -> Result<f64> {
    let a = q * q - eps;
    if !(a > 0.0) {
        return Err(Error::ImproperSheet);
    }
    Ok(k0 * a.sqrt())
}

fn residual_parts(t: &Terms, k_spp: f64, eps_s: f64) -> Result<[f64; 3]> {
    let q = k_spp / t.k0;
    let (a_s, a_p) = (decay(t.k0, q, eps_s)?, decay(t.k0, q, t.eps_eff)?);
    Ok([a_s / eps_s, a_p / t.eps_eff, -t.e12 * k_spp / (t.e11 * t.eps_eff)])
}

/// α_s/ε_s + α_p/ε_eff − ε12 k_spp/(ε11 ε_eff).
pub fn spp_residual(k_spp: f64, omega: f64, eps_s: f64, p: &PlasmaParams) -> Result<f64> {
    let t = terms(p, omega)?;
    Ok(residual_parts(&t, k_spp, eps_s)?.iter().sum())
}

fn relative_residual(t: &Terms, k_spp: f64, eps_s: f64) -> Result<f64> {
    let r = residual_parts(t, k_spp, eps_s)?;
    let scale: f64 = r.iter().map(|x| x.abs()).sum();
    Ok(r.iter().sum::<f64>().abs() / scale.max(f64::MIN_POSITIVE))
}

fn check_eps_s(eps_s: f64) -> Result<()> {
    if !eps_s.is_finite() || eps_s == 0.0 {
        return Err(Error::InvalidInput(format!("eps_s must be finite and nonzero, got {eps_s}")));
    }
    Ok(())
}

/// All roots with k_spp in the given direction, |k_spp|/k0 < 40, nearest first.
pub fn spp_roots(omega: f64, eps_s: f64, p: &PlasmaParams, direction: Direction) -> Result<Vec<SppSolution>> {
    check_eps_s(eps_s)?;
    let t = terms(p, omega)?;
    let s = direction.sign();
    // scan |k| and map to the signed axis so that the two sides mirror exactly
    let f = |x: f64| residual_parts(&t, s * x * t.k0, eps_s).map(|r| r.iter().sum()).unwrap_or(f64::NAN);
    let mut grid = lin_grid(SCAN_MAX / SCAN_POINTS as f64, SCAN_MAX, SCAN_POINTS);
    // roots can sit far closer to the branch point than the uniform step
    let branch = t.eps_eff.max(eps_s).max(0.0).sqrt();
    if branch > 0.0 {
        grid.extend(log_grid(1e-12, 1.0, 400).into_iter().map(|d| branch * (1.0 + d)));
        grid.sort_by(f64::total_cmp);
    }
    let mut out = Vec::new();
    for (lo, hi) in sign_changes(f, &grid) {
        let x = bisect(f, lo, hi, 4.0 * f64::EPSILON)?;
        let k_spp = s * x * t.k0;
        let residual = relative_residual(&t, k_spp, eps_s)?;
        if residual > 1e-10 {
            continue;
        }
        let q = k_spp / t.k0;
        out.push(SppSolution {
            omega,
            k_spp,
            alpha_s: decay(t.k0, q, eps_s)?,
            alpha_p: decay(t.k0, q, t.eps_eff)?,
            eps_s,
            plasma: *p,
            residual,
            radiative: eps_s > 0.0,
        });
    }
    Ok(out)
}

/// The root nearest k = 0 in the given direction.
pub fn solve_spp(omega: f64, eps_s: f64, p: &PlasmaParams, direction: Direction) -> Result<SppSolution> {
    spp_roots(omega, eps_s, p, direction)?.into_iter().next().ok_or_else(|| {
        Error::NoSolution(format!("no {direction:?} SPP at omega = {omega:e} rad/s, eps_s = {eps_s}"))
    })
}

/// Perfect-conductor limit: k_spp = sgn(ε12) k0 √ε11, α_p = k0 |ε12|/√ε11.
pub fn pec_limit_spp(omega: f64, p: &PlasmaParams) -> Result<SppSolution> {
    let g = p.gyro(omega)?;
    if !(g.e11 > 0.0) {
        return Err(Error::BelowPlasmaFrequency(omega));
    }
    if g.e12 == 0.0 {
        return Err(Error::NoSolution("unbiased plasma: no surface mode on a conductor".into()));
    }
    let k0 = omega / C0;
    Ok(SppSolution {
        omega,
        k_spp: g.e12.signum() * k0 * g.e11.sqrt(),
        alpha_s: f64::INFINITY,
        alpha_p: k0 * g.e12.abs() / g.e11.sqrt(),
        eps_s: f64::NEG_INFINITY,
        plasma: *p,
        residual: 0.0,
        radiative: false,
    })
}

/// First-order shift of the finite-ε_s root away from the conductor limit:
/// δk = ε12 k0/√|ε_s|, pushing |k| outward.
pub fn pec_proxy_offset(omega: f64, eps_s: f64, p: &PlasmaParams) -> Result<f64> {
    let g = p.gyro(omega)?;
    Ok(g.e12 * omega / C0 / eps_s.abs().sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConfinementPoint {
    pub omega: f64,
    pub omega_c: f64,
    /// α_p c/ωp, None where no conductor-backed SPP exists.
    pub alpha_p_norm: Option<f64>,
}

/// α_p of the conductor-backed SPP over a sweep of ω at fixed plasma.
pub fn pec_confinement(omegas: &[f64], p: &PlasmaParams) -> Vec<ConfinementPoint> {
    omegas
        .par_iter()
        .map(|&w| ConfinementPoint {
            omega: w,
            omega_c: p.omega_c,
            alpha_p_norm: pec_limit_spp(w, p).ok().map(|s| s.alpha_p * C0 / p.omega_p),
        })
        .collect()
}

/// α_p over an (ω, ωc) grid, ω-major order.
pub fn confinement_map(omegas: &[f64], omega_cs: &[f64], omega_p: f64) -> Result<Vec<ConfinementPoint>> {
    let cells: Vec<(f64, f64)> = omegas.iter().flat_map(|&w| omega_cs.iter().map(move |&c| (w, c))).collect();
    cells
        .par_iter()
        .map(|&(w, wc)| {
            let p = PlasmaParams::new(omega_p, wc)?;
            Ok(ConfinementPoint { omega: w, omega_c: wc, alpha_p_norm: pec_limit_spp(w, &p).ok().map(|s| s.alpha_p * C0 / omega_p) })
        })
        .collect()
}

/// ω at the confinement maximum of a sweep, with its index.
pub fn confinement_peak(points: &[ConfinementPoint]) -> Option<(usize, f64)> {
    points
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.alpha_p_norm.map(|a| (i, a)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| (i, points[i].omega))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SppBandPoint {
    pub omega: f64,
    pub k_spp: Option<f64>,
    pub alpha_s: Option<f64>,
    pub alpha_p: Option<f64>,
    /// dω/dk by centered difference over neighbouring solutions.
    pub v_g: Option<f64>,
    pub in_gap: bool,
}

/// SPP dispersion over a frequency list. `eps_s = None` uses the conductor
/// closed form. Frequencies without a root are kept with empty fields.
pub fn spp_band(omegas: &[f64], eps_s: Option<f64>, p: &PlasmaParams, direction: Direction) -> Result<Vec<SppBandPoint>> {
    let (g_lo, g_hi) = tm_gap(&Medium::Plasma(*p))?;
    let sols: Vec<Option<SppSolution>> = omegas
        .par_iter()
        .map(|&w| match eps_s {
            None => pec_limit_spp(w, p).ok().filter(|s| s.k_spp.signum() == direction.sign()),
            Some(e) => solve_spp(w, e, p, direction).ok(),
        })
        .collect();
    let n = omegas.len();
    Ok((0..n)
        .map(|i| {
            let k_at = |j: usize| sols[j].map(|s| (omegas[j], s.k_spp));
            let (a, b) = (if i > 0 { i - 1 } else { i }, if i + 1 < n { i + 1 } else { i });
            let v_g = match (k_at(a), k_at(b), sols[i]) {
                (Some((w0, k0)), Some((w1, k1)), Some(_)) if b > a && k1 != k0 => Some((w1 - w0) / (k1 - k0)),
                _ => None,
            };
            SppBandPoint {
                omega: omegas[i],
                k_spp: sols[i].map(|s| s.k_spp),
                alpha_s: sols[i].map(|s| s.alpha_s),
                alpha_p: sols[i].map(|s| s.alpha_p),
                v_g,
                in_gap: omegas[i] > g_lo && omegas[i] < g_hi,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldProfile {
    pub y: Vec<f64>,
    pub e_x: Vec<C64>,
    pub e_y: Vec<C64>,
    pub h_z: Vec<C64>,
}

/// Fields at the given heights with H_z(0) = 1 A/m; y > 0 is the simple medium.
pub fn spp_field_profile(sol: &SppSolution, ys: &[f64]) -> Result<FieldProfile> {
    let g = sol.plasma.gyro(sol.omega)?;
    let delta = g.e11 * g.e11 - g.e12 * g.e12;
    let we = sol.omega * EPS0;
    let (k, i) = (sol.k_spp, C64::i());
    let mut out = FieldProfile { y: ys.to_vec(), e_x: vec![], e_y: vec![], h_z: vec![] };
    for &y in ys {
        let (ex, ey, h) = if y >= 0.0 {
            if sol.eps_s.is_infinite() {
                (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(if y == 0.0 { 1.0 } else { 0.0 }, 0.0))
            } else {
                let h = (-sol.alpha_s * y).exp();
                (-i * sol.alpha_s * h / (we * sol.eps_s), C64::new(k * h / (we * sol.eps_s), 0.0), C64::new(h, 0.0))
            }
        } else {
            let h = (sol.alpha_p * y).exp();
            (
                i * (g.e11 * sol.alpha_p - g.e12 * k) * h / (we * delta),
                C64::new((-g.e12 * sol.alpha_p + g.e11 * k) * h / (we * delta), 0.0),
                C64::new(h, 0.0),
            )
        };
        out.e_x.push(ex);
        out.e_y.push(ey);
        out.h_z.push(h);
    }
    Ok(out)
}

/// Edge-channel count against the gap Chern number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BulkEdgeCheck {
    pub omega: f64,
    pub gap_chern: i64,
    pub forward: usize,
    pub backward: usize,
    pub consistent: bool,
}

/// Counts SPP roots each way at ω and compares |net| with |C_gap|.
pub fn bulk_edge_check(omega: f64, eps_s: f64, p: &PlasmaParams, gap_chern: i64) -> Result<BulkEdgeCheck> {
    let forward = spp_roots(omega, eps_s, p, Direction::Forward)?.len();
    let backward = spp_roots(omega, eps_s, p, Direction::Backward)?.len();
    let net = forward as i64 - backward as i64;
    Ok(BulkEdgeCheck { omega, gap_chern, forward, backward, consistent: net.abs() == gap_chern.abs() })
}
