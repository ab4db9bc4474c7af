//! Bulk modes of the biased plasma: dispersion, TE/TM envelopes, Faraday
//! waves and the polar form of the TM field.

use nalgebra::Vector3;
use serde::Serialize;

use crate::consts::{eta0, C0, EPS0, MU0};
use crate::em::{c, SixVector};
use crate::media::{Gyro, Medium, PlasmaParams};
use crate::roots;
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    TE,
    TM,
    #[serde(rename = "cp+")]
    CpPlus,
    #[serde(rename = "cp-")]
    CpMinus,
}

/// Position of a TM band relative to the gap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BandLabel {
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DispersionSample {
    pub k_mag: f64,
    pub omega: f64,
    pub band: BandLabel,
    pub polarization: Polarization,
    pub residual: f64,
}

pub fn tm_effective_eps(p: &PlasmaParams, omega: f64) -> Result<f64> {
    eps_eff(&p.gyro(omega)?)
}

pub(crate) fn eps_eff(g: &Gyro) -> Result<f64> {
    if g.e11.abs() <= 1e-14 {
        return Err(Error::DivisionByZero("eps11 = 0 in eps_eff"));
    }
    Ok((g.e11 * g.e11 - g.e12 * g.e12) / g.e11)
}

/// |Δω² − ε11 c²k²| relative to the size of its terms.
pub fn tm_residual(g: &Gyro, omega: f64, k: f64) -> f64 {
    let delta = g.e11 * g.e11 - g.e12 * g.e12;
    let (a, b) = (delta * omega * omega, g.e11 * C0 * C0 * k * k);
    let scale = (g.e11 * g.e11 + g.e12 * g.e12) * omega * omega + b.abs();
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

pub fn te_residual(g: &Gyro, omega: f64, k: f64) -> f64 {
    let (a, b) = (g.e33 * omega * omega, C0 * C0 * k * k);
    (a - b).abs() / (omega * omega + b).max(f64::MIN_POSITIVE)
}

/// Pole-free TM dispersion function in u = ω² − ωc² − σ, σ = s·ωp².
/// Its zeros in ω are exactly the TM bands; Q(u) = u² + (ωc² − c²k²)u − ωc²σ.
fn tm_quadratic_roots(wc2: f64, sigma: f64, k: f64) -> (f64, f64) {
    let b = wc2 - C0 * C0 * k * k;
    let cc = -wc2 * sigma;
    let disc = (b * b - 4.0 * cc).max(0.0).sqrt();
    // stable pair: the larger-magnitude root first, the other from the product
    let q = -0.5 * (b + b.signum() * disc);
    if q == 0.0 {
        return (0.0, 0.0);
    }
    let (r1, r2) = (q, cc / q);
    if r1 <= r2 {
        (r1, r2)
    } else {
        (r2, r1)
    }
}

fn plasma_sigma(medium: &Medium, k: f64) -> Option<(f64, f64)> {
    match medium {
        Medium::Plasma(p) => Some((p.omega_c * p.omega_c, p.omega_p * p.omega_p)),
        Medium::NonlocalPlasma(np) => Some((np.base.omega_c.powi(2), np.cutoff(k * k) * np.base.omega_p.powi(2))),
        _ => None,
    }
}

/// ω(|k|) for one band of the requested polarization.
pub fn solve_bulk_band(medium: &Medium, k_mag: f64, band: BandLabel, pol: Polarization) -> Result<DispersionSample> {
    if !(k_mag >= 0.0 && k_mag.is_finite()) {
        return Err(Error::InvalidInput(format!("k_mag must be non-negative, got {k_mag}")));
    }
    let sample = |omega: f64, residual: f64| DispersionSample { k_mag, omega, band, polarization: pol, residual };
    let single = |eps: f64| -> Result<DispersionSample> {
        if band == BandLabel::Lower {
            return Err(Error::NoRootInBracket("a non-gyrotropic medium has a single band".into()));
        }
        Ok(sample(C0 * k_mag / eps.sqrt(), 0.0))
    };
    match (medium, pol) {
        (Medium::Vacuum, Polarization::TE | Polarization::TM) => single(1.0),
        (Medium::Dielectric { eps }, Polarization::TE | Polarization::TM) if *eps > 0.0 => single(*eps),
        (Medium::Plasma(_) | Medium::NonlocalPlasma(_), Polarization::TM) => {
            let (wc2, sigma) = plasma_sigma(medium, k_mag).unwrap();
            let (um, up) = tm_quadratic_roots(wc2, sigma, k_mag);
            let u = if band == BandLabel::Lower { um } else { up };
            let w2 = u + sigma + wc2;
            if !(w2 > 0.0) {
                return Err(Error::NoRootInBracket(format!("{band:?} TM band absent at k = {k_mag:e}")));
            }
            let omega = w2.sqrt();
            let g = medium.gyro(omega, k_mag * k_mag)?.unwrap();
            Ok(sample(omega, tm_residual(&g, omega, k_mag)))
        }
        (Medium::Plasma(_) | Medium::NonlocalPlasma(_), Polarization::TE) => {
            if band == BandLabel::Lower {
                return Err(Error::NoRootInBracket("the TE plasma branch is a single band".into()));
            }
            let (_, sigma) = plasma_sigma(medium, k_mag).unwrap();
            let omega = (sigma + C0 * C0 * k_mag * k_mag).sqrt();
            let g = medium.gyro(omega, k_mag * k_mag)?.unwrap();
            Ok(sample(omega, te_residual(&g, omega, k_mag)))
        }
        _ => Err(Error::InvalidInput(format!("no {pol:?} band solver for this medium"))),
    }
}

/// (max of the lower TM band, min of the upper TM band) over |k|. The pair
/// is ordered only when a gap is open.
pub fn tm_gap(medium: &Medium) -> Result<(f64, f64)> {
    let p = medium.plasma().ok_or_else(|| Error::InvalidInput("plasma medium required".into()))?;
    let k_ref = p.omega_p / C0;
    let mut ks = vec![0.0];
    ks.extend(roots::log_grid(1e-4 * k_ref, 1e4 * k_ref, 4000));
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for k in ks {
        if let Ok(s) = solve_bulk_band(medium, k, BandLabel::Lower, Polarization::TM) {
            lo = lo.max(s.omega);
        }
        if let Ok(s) = solve_bulk_band(medium, k, BandLabel::Upper, Polarization::TM) {
            hi = hi.min(s.omega);
        }
    }
    Ok((lo, hi))
}

/// TM roots by scanning a log grid and bisecting the ε_eff relation
/// cleared of its poles. Independent of the closed-form path above.
pub fn bracket_tm_roots(medium: &Medium, k_mag: f64) -> Result<Vec<f64>> {
    let p = medium.plasma().ok_or_else(|| Error::InvalidInput("plasma medium required".into()))?;
    let wuh = p.upper_hybrid();
    let hi = (10.0 * wuh).max(2.0 * (C0 * k_mag + wuh));
    let grid = roots::log_grid(1e-4 * p.omega_p, hi, 20_000);
    let wc2 = p.omega_c * p.omega_c;
    // (ω² − ωc²)² · [Δω² − ε11 c²k²], written without poles
    let f = |w: f64| -> f64 {
        let g = match medium.gyro(w, k_mag * k_mag) {
            Ok(Some(g)) => g,
            _ => return f64::NAN,
        };
        let pp = w * w - wc2;
        let a = g.e11 * pp;
        let b = g.e12 * pp * w;
        (a * a - b * b / (w * w)) * w * w - a * pp * C0 * C0 * k_mag * k_mag
    };
    let mut out = Vec::new();
    for (lo, hi) in roots::sign_changes(f, &grid) {
        // skip the removable point at the resonance
        if lo <= p.omega_c.abs() && p.omega_c.abs() <= hi {
            continue;
        }
        out.push(roots::bisect(f, lo, hi, 1e-12)?);
    }
    Ok(out)
}

fn env(e: [C64; 3], h: [C64; 3]) -> SixVector {
    SixVector::new(Vector3::from(e), Vector3::from(h))
}

/// TM envelope with H_z = 1 A/m for in-plane scalars `g`.
pub fn tm_envelope_gyro(g: &Gyro, k: [f64; 2], omega: f64) -> Result<SixVector> {
    let delta = g.e11 * g.e11 - g.e12 * g.e12;
    if delta.abs() <= 1e-14 * (g.e11 * g.e11 + g.e12 * g.e12).max(1e-300) || delta == 0.0 {
        return Err(Error::DegenerateDenominator("eps11^2 = eps12^2"));
    }
    let i = C64::i();
    let d = EPS0 * omega * delta;
    let [kx, ky] = k;
    let ex = (c(-g.e11 * ky) - i * (g.e12 * kx)) / d;
    let ey = (-i * (g.e12 * ky) + c(g.e11 * kx)) / d;
    Ok(env([ex, ey, c(0.0)], [c(0.0), c(0.0), c(1.0)]))
}

pub fn tm_envelope(p: &PlasmaParams, k: [f64; 2], omega: f64) -> Result<SixVector> {
    tm_envelope_gyro(&p.gyro(omega)?, k, omega)
}

/// TE envelope with E_z = 1 V/m.
pub fn te_envelope(k: [f64; 2], omega: f64) -> Result<SixVector> {
    if !(omega > 0.0) {
        return Err(Error::InvalidInput("omega must be positive".into()));
    }
    let s = MU0 * omega;
    Ok(env([c(0.0), c(0.0), c(1.0)], [c(k[1] / s), c(-k[0] / s), c(0.0)]))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FaradayWaves {
    pub k_plus: f64,
    pub k_minus: f64,
    pub k_z: f64,
    pub y_plus: f64,
    pub y_minus: f64,
}

impl FaradayWaves {
    /// Polarization rotation per unit length along the bias.
    pub fn rotation_per_length(&self) -> f64 {
        0.5 * (self.k_minus - self.k_plus)
    }
}

pub fn faraday_wavenumbers(p: &PlasmaParams, omega: f64) -> Result<FaradayWaves> {
    let g = p.gyro(omega)?;
    let (rp, rm) = (g.e11 - g.e12, g.e11 + g.e12);
    if rp < 0.0 {
        return Err(Error::EvanescentBranch("eps11 - eps12 < 0 (k_plus)"));
    }
    if rm < 0.0 {
        return Err(Error::EvanescentBranch("eps11 + eps12 < 0 (k_minus)"));
    }
    let k0 = omega / C0;
    let (kp, km) = (k0 * rp.sqrt(), k0 * rm.sqrt());
    Ok(FaradayWaves { k_plus: kp, k_minus: km, k_z: 0.5 * (kp + km), y_plus: rp.sqrt() / eta0(), y_minus: rm.sqrt() / eta0() })
}

/// CP envelope for propagation along the bias: (e±, ∓i Y± e±), e± = x̂ ± iŷ.
pub fn cp_envelope_along_bias(p: &PlasmaParams, omega: f64, plus: bool) -> Result<(SixVector, f64)> {
    let fw = faraday_wavenumbers(p, omega)?;
    let i = C64::i();
    let (s, y, k) = if plus { (1.0, fw.y_plus, fw.k_plus) } else { (-1.0, fw.y_minus, fw.k_minus) };
    let e = [c(1.0), i * s, c(0.0)];
    let h = e.map(|z| -i * s * y * z);
    Ok((env(e, h), k))
}

/// TM field in polar form E = E_φ (φ̂ + ratio_r r̂), with r̂ along k.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarState {
    pub e_phi: C64,
    pub ratio_r: C64,
    pub k: f64,
    pub omega: f64,
}

pub fn polar_state(p: &PlasmaParams, k: f64, omega: f64) -> Result<PolarState> {
    let g = p.gyro(omega)?;
    let ee = eps_eff(&g)?;
    Ok(PolarState {
        e_phi: c(k / (EPS0 * ee * omega)),
        ratio_r: C64::new(0.0, -g.e12 / g.e11),
        k,
        omega,
    })
}

/// Real field (E_r, E_φ, E_z) at time t and radius r: Re{E e^{i(kr − ωt)}}.
pub fn instantaneous_field(state: &PolarState, t: f64, r: f64) -> Vector3<f64> {
    let ph = C64::from_polar(1.0, state.k * r - state.omega * t);
    let ephi = state.e_phi * ph;
    Vector3::new((ephi * state.ratio_r).re, ephi.re, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consts::thz;
    use crate::em::{assemble_curl, eigen_residual, MaterialModel};
    use crate::media::NonlocalParams;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn fig_e1() -> (PlasmaParams, f64) {
        (PlasmaParams::new(thz(9.0), thz(1.73)).unwrap(), thz(10.0))
    }

    fn residual_of(medium: &Medium, f: &SixVector, kx: f64, ky: f64, omega: f64) -> f64 {
        let k = Vector3::new(kx, ky, 0.0);
        let m = medium.material(omega, &k).unwrap().m;
        eigen_residual(&assemble_curl(&k), &m, f, omega)
    }

    #[test]
    fn eps_eff_examples() {
        let p = PlasmaParams::new(thz(10.0), 0.0).unwrap();
        let w = thz(13.0);
        assert_relative_eq!(tm_effective_eps(&p, w).unwrap(), 1.0 - (10.0f64 / 13.0).powi(2), max_relative = 1e-14);
        let (p, w) = fig_e1();
        let e = tm_effective_eps(&p, w).unwrap();
        assert!(e > 0.0);
        assert_relative_eq!(e, 0.038_552, max_relative = 1e-4);
        let z = PlasmaParams::new(thz(10.0), thz(2.0)).unwrap();
        assert!(matches!(tm_effective_eps(&z, z.upper_hybrid()), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn unbiased_bands_meet_at_plasma_frequency() {
        let p = PlasmaParams::new(thz(10.0), 0.0).unwrap();
        let m = Medium::Plasma(p);
        let lo = solve_bulk_band(&m, 0.0, BandLabel::Lower, Polarization::TM).unwrap();
        let up = solve_bulk_band(&m, 0.0, BandLabel::Upper, Polarization::TM).unwrap();
        assert_relative_eq!(lo.omega, p.omega_p, max_relative = 1e-14);
        assert_relative_eq!(up.omega, p.omega_p, max_relative = 1e-14);
    }

    #[test]
    fn biased_band_edges() {
        let p = PlasmaParams::new(1.0e13, 0.2e13).unwrap();
        let m = Medium::Plasma(p);
        let lo = solve_bulk_band(&m, 0.0, BandLabel::Lower, Polarization::TM).unwrap();
        let up = solve_bulk_band(&m, 0.0, BandLabel::Upper, Polarization::TM).unwrap();
        assert_relative_eq!(lo.omega, p.omega_l(), max_relative = 1e-12);
        assert_relative_eq!(up.omega, p.omega_r(), max_relative = 1e-12);
        let far = solve_bulk_band(&m, 1e4 * p.omega_p / C0, BandLabel::Lower, Polarization::TM).unwrap();
        assert_relative_eq!(far.omega, p.upper_hybrid(), max_relative = 1e-6);
    }

    #[test]
    fn vacuum_limit() {
        let p = PlasmaParams::new(1e-3, 0.0).unwrap();
        let k = 1e5;
        let s = solve_bulk_band(&Medium::Plasma(p), k, BandLabel::Upper, Polarization::TM).unwrap();
        assert_relative_eq!(s.omega, C0 * k, max_relative = 1e-12);
        let v = solve_bulk_band(&Medium::Vacuum, k, BandLabel::Upper, Polarization::TE).unwrap();
        assert_eq!(v.omega, C0 * k);
    }

    #[test]
    fn local_vs_nonlocal_small_k() {
        let p = PlasmaParams::new(1.0e13, 0.2e13).unwrap();
        let np = NonlocalParams::new(p, 100.0 * p.omega_c / C0).unwrap();
        let k = 0.5 * p.omega_p / C0;
        for band in [BandLabel::Lower, BandLabel::Upper] {
            let a = solve_bulk_band(&Medium::Plasma(p), k, band, Polarization::TM).unwrap();
            let b = solve_bulk_band(&Medium::NonlocalPlasma(np), k, band, Polarization::TM).unwrap();
            assert_relative_eq!(a.omega, b.omega, max_relative = 1e-3);
        }
    }

    #[test]
    fn bracketed_roots_agree_with_closed_form() {
        let p = PlasmaParams::new(1.0e13, 0.2e13).unwrap();
        let np = NonlocalParams::new(p, 100.0 * p.omega_c / C0).unwrap();
        for medium in [Medium::Plasma(p), Medium::NonlocalPlasma(np)] {
            for kn in [0.05, 0.7, 3.0, 40.0] {
                let k = kn * p.omega_p / C0;
                let r = bracket_tm_roots(&medium, k).unwrap();
                assert_eq!(r.len(), 2, "k = {kn}: {r:?}");
                let lo = solve_bulk_band(&medium, k, BandLabel::Lower, Polarization::TM).unwrap();
                let up = solve_bulk_band(&medium, k, BandLabel::Upper, Polarization::TM).unwrap();
                assert_relative_eq!(r[0], lo.omega, max_relative = 1e-11);
                assert_relative_eq!(r[1], up.omega, max_relative = 1e-11);
                assert!(lo.residual <= 1e-10 && up.residual <= 1e-10);
            }
        }
    }

    #[test]
    fn nonlocal_lower_band_shape() {
        // ωc/ωp = 0.2, k_max = 100 ωc/c: rises slightly above 1 then falls to ωc
        let p = PlasmaParams::new(1.0, 0.2).unwrap();
        let np = NonlocalParams::new(p, 20.0 / C0).unwrap();
        let m = Medium::NonlocalPlasma(np);
        let w = |kn: f64, b| solve_bulk_band(&m, kn / C0, b, Polarization::TM).unwrap().omega;
        assert_relative_eq!(w(0.0, BandLabel::Lower), 0.904_987_562, max_relative = 1e-8);
        assert_relative_eq!(w(0.0, BandLabel::Upper), 1.104_987_562, max_relative = 1e-8);
        assert!(w(2.0, BandLabel::Lower) > 1.0);
        assert!(w(1e5, BandLabel::Lower) < 0.2 * 1.001);
    }

    #[test]
    fn tm_envelope_solves_maxwell() {
        let (p, w) = fig_e1();
        let m = Medium::Plasma(p);
        let k = (tm_effective_eps(&p, w).unwrap()).sqrt() * w / C0;
        for phi in [0.0f64, 0.7, 2.5] {
            let (kx, ky) = (k * f64::cos(phi), k * f64::sin(phi));
            let f = tm_envelope(&p, [kx, ky], w).unwrap();
            assert!(residual_of(&m, &f, kx, ky, w) <= 1e-12);
            assert_eq!(f.h[2], c(1.0));
        }
    }

    #[test]
    fn tm_envelope_unbiased_is_transverse_real() {
        let p = PlasmaParams::new(thz(9.0), 0.0).unwrap();
        let f = tm_envelope(&p, [3e5, 1e5], thz(10.0)).unwrap();
        assert!(f.e.iter().all(|z| z.im == 0.0));
        let e = Vector3::new(f.e[0].re, f.e[1].re, 0.0);
        assert!(e.dot(&Vector3::new(3e5, 1e5, 0.0)).abs() <= 1e-12 * e.norm() * 3.2e5);
    }

    #[test]
    fn tm_envelope_polar_form() {
        let (p, w) = fig_e1();
        let k = 2e5;
        let phi: f64 = 0.4;
        let f = tm_envelope(&p, [k * phi.cos(), k * phi.sin()], w).unwrap();
        let st = polar_state(&p, k, w).unwrap();
        let rhat = Vector3::new(c(phi.cos()), c(phi.sin()), c(0.0));
        let phihat = Vector3::new(c(-phi.sin()), c(phi.cos()), c(0.0));
        let want = (phihat + rhat * st.ratio_r) * st.e_phi;
        assert!((f.e - want).norm() <= 1e-12 * want.norm());
        assert_eq!(st.ratio_r.re, 0.0);
    }

    #[test]
    fn tm_envelope_degenerate() {
        let p = PlasmaParams::new(1.0e13, 0.2e13).unwrap();
        assert!(matches!(tm_envelope(&p, [1.0, 0.0], p.omega_r()), Err(Error::DegenerateDenominator(_))));
    }

    #[test]
    fn te_envelope_examples() {
        let w = 1e13;
        let f = te_envelope([2e4, 0.0], w).unwrap();
        assert_relative_eq!(f.h[1].re, -2e4 / (MU0 * w), max_relative = 1e-15);
        assert_eq!(f.h[0], c(0.0));
        assert!(f.e.iter().chain(f.h.iter()).all(|z| z.im == 0.0));
        let p = PlasmaParams::new(thz(9.0), thz(1.73)).unwrap();
        let m = Medium::Plasma(p);
        let s = solve_bulk_band(&m, 3e5, BandLabel::Upper, Polarization::TE).unwrap();
        let f = te_envelope([3e5 * 0.6, 3e5 * 0.8], s.omega).unwrap();
        assert!(residual_of(&m, &f, 3e5 * 0.6, 3e5 * 0.8, s.omega) <= 1e-12);
    }

    #[test]
    fn faraday_examples() {
        let p = PlasmaParams::new(thz(9.0), 0.0).unwrap();
        let fw = faraday_wavenumbers(&p, thz(10.0)).unwrap();
        assert_eq!(fw.k_plus, fw.k_minus);
        assert_eq!(fw.rotation_per_length(), 0.0);
        let (p, w) = fig_e1();
        let fw = faraday_wavenumbers(&p, w).unwrap();
        assert!(fw.k_plus != fw.k_minus);
        // direct phase difference of the two CP waves after a length L
        let l = 1e-4;
        let (ep, _) = cp_envelope_along_bias(&p, w, true).unwrap();
        let (em_, _) = cp_envelope_along_bias(&p, w, false).unwrap();
        let field = ep.e * C64::from_polar(1.0, fw.k_plus * l) + em_.e * C64::from_polar(1.0, fw.k_minus * l);
        // x̂-polarized at z = 0; real direction after propagation
        let ang = (field[1] / field[0]).re.atan();
        let want = fw.rotation_per_length() * l;
        assert!((ang - want).abs() < 1e-9 || (ang - want).abs() > PI - 1e-9);
        let low = PlasmaParams::new(thz(9.0), thz(1.73)).unwrap();
        assert!(matches!(faraday_wavenumbers(&low, thz(5.0)), Err(Error::EvanescentBranch(_))));
    }

    #[test]
    fn cp_envelope_solves_maxwell() {
        let (p, w) = fig_e1();
        for plus in [true, false] {
            let (f, k) = cp_envelope_along_bias(&p, w, plus).unwrap();
            let kv = Vector3::new(0.0, 0.0, k);
            let m = Medium::Plasma(p).material(w, &kv).unwrap().m;
            assert!(eigen_residual(&assemble_curl(&kv), &m, &f, w) <= 1e-12);
        }
    }

    #[test]
    fn ellipse_axis_ratio() {
        let w = thz(10.0);
        let p = PlasmaParams::new(0.84 * w, 0.15 * w).unwrap();
        let g = p.gyro(w).unwrap();
        let k = tm_effective_eps(&p, w).unwrap().sqrt() * w / C0;
        let st = polar_state(&p, k, w).unwrap();
        let n = 4096;
        let pts: Vec<_> = (0..=n).map(|j| instantaneous_field(&st, 2.0 * PI * j as f64 / (n as f64 * w), 0.0)).collect();
        let er = pts.iter().fold(0.0f64, |a, v| a.max(v[0].abs()));
        let ep = pts.iter().fold(0.0f64, |a, v| a.max(v[1].abs()));
        assert_relative_eq!(er / ep, (g.e12 / g.e11).abs(), max_relative = 1e-6);
        assert!((pts[0] - pts[n]).norm() <= 1e-12 * ep);
        let u = polar_state(&PlasmaParams::new(0.84 * w, 0.0).unwrap(), k, w).unwrap();
        assert!((0..50).all(|j| instantaneous_field(&u, j as f64 * 1e-15, 0.0)[0] == 0.0));
    }

    proptest! {
        #[test]
        fn bands_isotropic_and_ordered(kn in 0.0f64..30.0, wc in 0.05f64..0.6, phi in 0.0f64..(2.0 * PI)) {
            let p = PlasmaParams::new(1e13, wc * 1e13).unwrap();
            let m = Medium::Plasma(p);
            let k = kn * p.omega_p / C0;
            let lo = solve_bulk_band(&m, k, BandLabel::Lower, Polarization::TM).unwrap();
            let up = solve_bulk_band(&m, k, BandLabel::Upper, Polarization::TM).unwrap();
            prop_assert!(up.omega > lo.omega);
            prop_assert!(lo.residual <= 1e-10 && up.residual <= 1e-10);
            prop_assert!(lo.omega <= p.upper_hybrid() * (1.0 + 1e-12) && up.omega >= p.omega_r() * (1.0 - 1e-12));
            for (s, b) in [(lo, BandLabel::Lower), (up, BandLabel::Upper)] {
                let f = tm_envelope(&p, [k * phi.cos(), k * phi.sin()], s.omega).unwrap();
                let r = residual_of(&m, &f, k * phi.cos(), k * phi.sin(), s.omega);
                prop_assert!(r <= 1e-8, "{:?} residual {}", b, r);
            }
        }

        #[test]
        fn faraday_split_iff_biased(wc in -0.3f64..0.3) {
            let p = PlasmaParams::new(0.5e13, wc * 1e13).unwrap();
            let fw = faraday_wavenumbers(&p, 1e13).unwrap();
            prop_assert_eq!(fw.k_plus != fw.k_minus, wc != 0.0);
        }
    }
}
