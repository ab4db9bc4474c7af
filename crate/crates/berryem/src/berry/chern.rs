//! Chern numbers on a compactified polar grid.

use rayon::prelude::*;
use serde::Serialize;

use super::numeric::{plaquette_phase, wrap_phase, BandStates, BulkBandStates};
use crate::bulk::{BandLabel, Polarization};
use crate::consts::C0;
use crate::em::Vec6;
use crate::media::Medium;
use crate::{Error, Result, C64};

use std::f64::consts::PI;

/// Polar grid with k = K tan(u): rings at u_i, i = 0..=n_radial, from
/// u_max/(2 n_radial) up to u_max = atan(k_outer/K).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChernGrid {
    pub n_radial: usize,
    pub n_angular: usize,
    pub k_scale: f64,
    pub k_outer: f64,
}

impl ChernGrid {
    /// K = ωp/c and k_outer = 50 k_max.
    pub fn for_medium(medium: &Medium, n_radial: usize, n_angular: usize) -> Result<Self> {
        match medium {
            Medium::NonlocalPlasma(np) => Ok(Self {
                n_radial,
                n_angular,
                k_scale: np.base.omega_p / C0,
                k_outer: 50.0 * np.k_max,
            }),
            Medium::Plasma(p) if p.omega_c != 0.0 => Err(Error::NotRegularized(
                "the local plasma keeps a non-integer flux at large k; use the nonlocal model",
            )),
            _ => Err(Error::InvalidInput("Chern grids are set up for plasma media".into())),
        }
    }

    pub fn rings(&self) -> Vec<f64> {
        let umax = (self.k_outer / self.k_scale).atan();
        let umin = 0.5 * umax / self.n_radial as f64;
        (0..=self.n_radial)
            .map(|i| self.k_scale * (umin + (umax - umin) * i as f64 / self.n_radial as f64).tan())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChernResult {
    pub band: BandLabel,
    pub value: f64,
    pub nearest_integer: i64,
    pub deviation: f64,
    /// Flux through the disk |k| ≤ k_outer, in units of 2π.
    pub raw_flux: f64,
    /// Flux of the cap beyond k_outer, from its boundary loop, in units of 2π.
    pub boundary_correction: f64,
    pub max_plaquette_phase: f64,
    pub grid: ChernGrid,
}

fn ring_phase(ws: &[Vec6]) -> f64 {
    let n = ws.len();
    let mut prod = C64::new(1.0, 0.0);
    for j in 0..n {
        let o = ws[(j + 1) % n].dotc(&ws[j]);
        prod *= o / o.norm();
    }
    prod.arg()
}

/// Plaquette flux of `states` over the polar grid plus the inner-disk and
/// outer-cap loop corrections.
pub fn chern_polar(states: &dyn BandStates, band: BandLabel, grid: &ChernGrid) -> Result<ChernResult> {
    let (nr, na) = (grid.n_radial, grid.n_angular);
    if nr < 2 || na < 3 {
        return Err(Error::InvalidInput("Chern grid needs n_radial ≥ 2 and n_angular ≥ 3".into()));
    }
    let ks = grid.rings();
    let nodes: Vec<[f64; 2]> = ks
        .iter()
        .flat_map(|&k| {
            (0..na).map(move |j| {
                let phi = 2.0 * PI * j as f64 / na as f64;
                [k * phi.cos(), k * phi.sin()]
            })
        })
        .collect();
    let ws = nodes.par_iter().map(|&k| states.state(k)).collect::<Result<Vec<_>>>()?;
    let at = |i: usize, j: usize| &ws[i * na + j % na];
    // cell (i, j): r_i → r_{i+1} → φ_{j+1} → back, counter-clockwise
    let phases = (0..nr * na)
        .into_par_iter()
        .map(|c| {
            let (i, j) = (c / na, c % na);
            plaquette_phase(at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1), nodes[i * na + j])
        })
        .collect::<Result<Vec<_>>>()?;
    // fixed-order reduction keeps runs identical
    let flux: f64 = phases.iter().sum();
    let max_p = phases.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let inner = wrap_phase(ring_phase(&ws[..na]));
    let outer = wrap_phase(ring_phase(&ws[nr * na..]));
    let raw = (flux + inner) / (2.0 * PI);
    let value = raw - outer / (2.0 * PI);
    let nearest = value.round();
    Ok(ChernResult {
        band,
        value,
        nearest_integer: nearest as i64,
        deviation: (value - nearest).abs(),
        raw_flux: raw,
        boundary_correction: -outer / (2.0 * PI),
        max_plaquette_phase: max_p,
        grid: *grid,
    })
}

/// Chern number of a TM band of the regularized plasma on an n × n grid.
pub fn chern_number(medium: &Medium, band: BandLabel, n: usize) -> Result<ChernResult> {
    let grid = ChernGrid::for_medium(medium, n, n)?;
    let states = BulkBandStates::new(*medium, band, Polarization::TM)?;
    let r = chern_polar(&states, band, &grid)?;
    if r.deviation > 0.05 {
        return Err(Error::NonConvergent(format!("deviation {:.3e} from the nearest integer at n = {n}", r.deviation)));
    }
    if r.max_plaquette_phase > 0.5 * PI {
        return Err(Error::NonConvergent(format!(
            "plaquette phase {:.3} exceeds π/2 at n = {n}; refine the grid",
            r.max_plaquette_phase
        )));
    }
    Ok(r)
}

/// Runs [`chern_number`] on each resolution and requires the integer to hold.
pub fn chern_ladder(medium: &Medium, band: BandLabel, ladder: &[usize]) -> Result<Vec<ChernResult>> {
    let out = ladder.iter().map(|&n| chern_number(medium, band, n)).collect::<Result<Vec<_>>>()?;
    if let Some(r) = out.iter().find(|r| r.nearest_integer != out[0].nearest_integer) {
        return Err(Error::NonConvergent(format!(
            "Chern integer moved from {} to {} along the ladder",
            out[0].nearest_integer, r.nearest_integer
        )));
    }
    Ok(out)
}
