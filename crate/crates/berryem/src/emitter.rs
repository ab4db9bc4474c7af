//! Rotating isotropic emitter seen by a polarization-matched receiver at
//! θ = π/2, φ = 0: Berry connection of the far field, the voltage under a
//! small rotation, and the sidebands produced by vibration.

use rustfft::FftPlanner;
use serde::Serialize;

use crate::{Error, Result, C64};

use std::f64::consts::PI;
use std::fmt;

type RealFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// E = h(θ) e^{i g(φ)} θ̂ in the far field.
pub struct FarFieldModel {
    pub h: RealFn,
    pub g: RealFn,
}

impl fmt::Debug for FarFieldModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FarFieldModel")
    }
}

impl FarFieldModel {
    pub fn new(h: impl Fn(f64) -> f64 + Send + Sync + 'static, g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { h: Box::new(h), g: Box::new(g) }
    }

    /// g = nφ with a uniform amplitude.
    pub fn vortex(n: i32) -> Self {
        Self::new(|_| 1.0, move |phi| n as f64 * phi)
    }

    /// θ component of the far field.
    pub fn e_theta(&self, theta: f64, phi: f64) -> C64 {
        C64::from_polar((self.h)(theta), (self.g)(phi))
    }
}

/// A_φ = (i/k0) E*·∂φE / E*·E at θ = π/2, which reduces to −g'(φ)/k0.
/// The φ derivative is a central difference with step 1e−6 rad.
pub fn farfield_connection(model: &FarFieldModel, phi: f64, k0: f64) -> Result<f64> {
    if !(k0 > 0.0) {
        return Err(Error::InvalidInput("k0 must be positive".into()));
    }
    let h = 1e-6;
    let t = 0.5 * PI;
    let e = model.e_theta(t, phi);
    let de = (model.e_theta(t, phi + h) - model.e_theta(t, phi - h)) / (2.0 * h);
    let norm = e.norm_sqr();
    if !(norm > 0.0) {
        return Err(Error::DivisionByZero("no far field at the receiver"));
    }
    Ok((C64::i() * e.conj() * de / norm).re / k0)
}

/// V0 (1 + i A_φ k0 dφ).
pub fn rotated_voltage(v0: C64, a_phi: f64, k0: f64, dphi: f64) -> Result<C64> {
    if dphi.abs() > 0.1 {
        return Err(Error::PerturbationTooLarge(dphi));
    }
    Ok(v0 * C64::new(1.0, a_phi * k0 * dphi))
}

/// dγ = −A_φ k0 dφ.
pub fn incremental_phase(a_phi: f64, k0: f64, dphi: f64) -> f64 {
    -a_phi * k0 * dphi
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VoltageTrace {
    pub t: Vec<f64>,
    pub v: Vec<f64>,
    pub omega: f64,
    pub omega_vib: f64,
    pub dphi0: f64,
}

/// Samples per carrier period in synthesized traces.
pub const SAMPLES_PER_PERIOD: usize = 16;

/// V(t) = V0 cos ωt − V0 sin ωt dγ(t), dγ(t) = −A_φ k0 dφ0 cos Ωt.
pub fn voltage_trace(v0: f64, a_phi: f64, k0: f64, omega: f64, omega_vib: f64, dphi0: f64, periods: usize) -> Result<VoltageTrace> {
    if !(omega_vib > 0.0 && omega_vib < omega / 10.0) {
        return Err(Error::InvalidInput("vibration frequency must satisfy 0 < Ω < ω/10".into()));
    }
    if periods < 32 {
        return Err(Error::ResolutionInsufficient(format!("{periods} vibration periods; at least 32 needed")));
    }
    if dphi0.abs() > 0.1 {
        return Err(Error::PerturbationTooLarge(dphi0));
    }
    let carrier = omega / omega_vib * periods as f64;
    if (carrier - carrier.round()).abs() > 1e-9 * carrier {
        return Err(Error::ResolutionInsufficient(format!(
            "record holds {carrier} carrier periods; ω/Ω times the period count must be an integer"
        )));
    }
    let n = SAMPLES_PER_PERIOD * carrier.round() as usize;
    let duration = periods as f64 * 2.0 * PI / omega_vib;
    let dt = duration / n as f64;
    let mut trace = VoltageTrace { t: Vec::with_capacity(n), v: Vec::with_capacity(n), omega, omega_vib, dphi0 };
    for j in 0..n {
        let t = j as f64 * dt;
        let dg = incremental_phase(a_phi, k0, dphi0 * (omega_vib * t).cos());
        trace.t.push(t);
        trace.v.push(v0 * (omega * t).cos() - v0 * (omega * t).sin() * dg);
    }
    Ok(trace)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralLine {
    /// (f − f_carrier)/F_vib.
    pub offset: f64,
    pub amplitude: f64,
    /// Relative to the carrier.
    pub rel_db: f64,
}

/// One-sided amplitude spectrum around the carrier.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VibrationSpectrum {
    pub carrier_amplitude: f64,
    pub lines: Vec<SpectralLine>,
}

impl VibrationSpectrum {
    /// Lines louder than `floor_db` relative to the carrier, carrier excluded.
    pub fn lines_above(&self, floor_db: f64) -> Vec<SpectralLine> {
        self.lines.iter().copied().filter(|l| l.offset != 0.0 && l.rel_db > floor_db).collect()
    }

    pub fn at_offset(&self, offset: f64) -> Option<SpectralLine> {
        self.lines.iter().copied().find(|l| (l.offset - offset).abs() < 1e-9)
    }
}

/// Rectangular-window periodogram of a trace holding an integer number of
/// carrier and vibration periods, so every tone sits on a bin.
pub fn periodogram(trace: &VoltageTrace, periods: usize) -> Result<VibrationSpectrum> {
    let n = trace.v.len();
    let mut buf: Vec<C64> = trace.v.iter().map(|&x| C64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let amp: Vec<f64> = buf[..n / 2].iter().enumerate().map(|(j, x)| x.norm() * if j == 0 { 1.0 } else { 2.0 } / n as f64).collect();
    let carrier_bin = (trace.omega / trace.omega_vib * periods as f64).round() as usize;
    if carrier_bin >= amp.len() {
        return Err(Error::ResolutionInsufficient("carrier above Nyquist".into()));
    }
    let carrier = amp[carrier_bin];
    let lines = amp
        .iter()
        .enumerate()
        .map(|(j, &a)| SpectralLine {
            offset: (j as f64 - carrier_bin as f64) / periods as f64,
            amplitude: a,
            rel_db: 20.0 * (a / carrier).max(1e-300).log10(),
        })
        .collect();
    Ok(VibrationSpectrum { carrier_amplitude: carrier, lines })
}

/// Synthesizes the receiver voltage of a vibrating emitter and returns its spectrum.
pub fn vibration_spectrum(
    model: &FarFieldModel,
    v0: f64,
    omega: f64,
    omega_vib: f64,
    dphi0: f64,
    periods: usize,
) -> Result<VibrationSpectrum> {
    let k0 = omega / crate::consts::C0;
    let a_phi = farfield_connection(model, 0.0, k0)?;
    let trace = voltage_trace(v0, a_phi, k0, omega, omega_vib, dphi0, periods)?;
    periodogram(&trace, periods)
}
