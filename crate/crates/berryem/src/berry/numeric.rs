//! Berry quantities from sampled eigenstates: link phases, loops and plaquettes.
//!
//! Link convention: the phase picked up going from k to k + δ is
//! arg(w(k+δ)† w(k)), so that A·δ ≈ arg(w(k+δ)† w(k)) and A = i w†∇w.

use nalgebra::{DMatrix, Vector3};
use rayon::prelude::*;

use crate::bulk::{solve_bulk_band, BandLabel, Polarization};
use crate::consts::C0;
use crate::em::{assemble_curl, eigh_sorted, energy_weight, hermitian_sqrt_pair, to_relative, MaterialModel, Vec6};
use crate::media::Medium;
use crate::{Error, Result, C64};

use std::f64::consts::PI;

/// A smooth or arbitrary family of normalized weighted envelopes w(k) for one band.
pub trait BandStates: Sync {
    fn state(&self, k: [f64; 2]) -> Result<Vec6>;
}

/// Phase convention applied to each state after it is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaugeFix {
    /// Whatever phase the eigensolver returns.
    Raw,
    /// Make component `i` of w real and positive.
    RealComponent(usize),
}

impl GaugeFix {
    pub fn apply(&self, w: Vec6) -> Result<Vec6> {
        match *self {
            GaugeFix::Raw => Ok(w),
            GaugeFix::RealComponent(i) => {
                let a = w[i].norm();
                if a <= 1e-12 * w.norm() {
                    return Err(Error::DegeneratePoint(a));
                }
                Ok(w * (w[i].conj() / a))
            }
        }
    }

    pub fn tag(&self) -> String {
        match self {
            GaugeFix::Raw => "raw".into(),
            GaugeFix::RealComponent(i) => format!("real-component-{i}"),
        }
    }
}

/// In-plane (k_z = 0) band of a Medium, found as the null vector of
/// cN − ωM̃ on the TM (E_x, E_y, H_z) or TE (E_z, H_x, H_y) subspace.
#[derive(Clone, Debug)]
pub struct BulkBandStates {
    pub medium: Medium,
    pub band: BandLabel,
    pub polarization: Polarization,
    pub gauge: GaugeFix,
}

impl BulkBandStates {
    /// States with the natural gauge: H_z real for TM, E_z real for TE.
    pub fn new(medium: Medium, band: BandLabel, polarization: Polarization) -> Result<Self> {
        let gauge = match polarization {
            Polarization::TM => GaugeFix::RealComponent(5),
            Polarization::TE => GaugeFix::RealComponent(2),
            _ => return Err(Error::InvalidInput("in-plane states are TE or TM".into())),
        };
        Ok(Self { medium, band, polarization, gauge })
    }

    pub fn with_gauge(mut self, gauge: GaugeFix) -> Self {
        self.gauge = gauge;
        self
    }

    fn indices(&self) -> [usize; 3] {
        match self.polarization {
            Polarization::TE => [2, 3, 4],
            _ => [0, 1, 5],
        }
    }

    pub fn omega(&self, k: [f64; 2]) -> Result<f64> {
        Ok(solve_bulk_band(&self.medium, k[0].hypot(k[1]), self.band, self.polarization)?.omega)
    }
}

impl BandStates for BulkBandStates {
    fn state(&self, k: [f64; 2]) -> Result<Vec6> {
        let omega = self.omega(k)?;
        let k3 = Vector3::new(k[0], k[1], 0.0);
        let idx = self.indices();
        let mrel = to_relative(&self.medium.material(omega, &k3)?.m);
        let n = assemble_curl(&k3).n;
        let l = DMatrix::from_fn(3, 3, |r, s| {
            let (i, j) = (idx[r], idx[s]);
            n[(i, j)] * C0 - mrel[(i, j)] * omega
        });
        let (vals, vecs) = eigh_sorted(&l);
        let mut order: Vec<usize> = (0..3).collect();
        order.sort_by(|&a, &b| vals[a].abs().total_cmp(&vals[b].abs()));
        if vals[order[1]].abs() <= 1e-8 * l.norm() {
            return Err(Error::DegenerateSubspace(format!("two null vectors at k = ({:e}, {:e})", k[0], k[1])));
        }
        let g = vecs.column(order[0]).into_owned();
        let wrel = to_relative(&energy_weight(&self.medium, omega, &k3)?);
        let wsub = DMatrix::from_fn(3, 3, |r, s| wrel[(idx[r], idx[s])]);
        let (ws, _) = hermitian_sqrt_pair(&wsub)?;
        let v = ws * g;
        let norm = v.norm();
        let mut w = Vec6::zeros();
        for (r, &i) in idx.iter().enumerate() {
            w[i] = v[r] / norm;
        }
        self.gauge.apply(w)
    }
}

/// Multiplies another family by e^{iχ(k)}: a gauge change.
pub struct PhaseGauge<S, F> {
    pub inner: S,
    pub chi: F,
}

impl<S: BandStates, F: Fn([f64; 2]) -> f64 + Sync> BandStates for PhaseGauge<S, F> {
    fn state(&self, k: [f64; 2]) -> Result<Vec6> {
        Ok(self.inner.state(k)? * C64::from_polar(1.0, (self.chi)(k)))
    }
}

/// w(b)† w(a), guarded against orthogonal neighbours.
fn overlap(a: &Vec6, b: &Vec6, k: [f64; 2]) -> Result<C64> {
    let o = b.dotc(a);
    if o.norm() < 1e-8 {
        return Err(Error::DegeneratePoint(k[0].hypot(k[1])));
    }
    Ok(o)
}

/// Phase reduced to (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Forward-difference connection A_i = arg(w(k+δê_i)† w(k))/δ. Meaningful
/// only for a smooth gauge such as [`BulkBandStates::new`] provides.
pub fn connection_numeric(states: &dyn BandStates, k: [f64; 2], delta: f64) -> Result<[f64; 2]> {
    let w0 = states.state(k)?;
    let mut a = [0.0; 2];
    for (i, ai) in a.iter_mut().enumerate() {
        let mut kp = k;
        kp[i] += delta;
        *ai = overlap(&w0, &states.state(kp)?, k)?.arg() / delta;
    }
    Ok(a)
}

/// Closed path in the k-plane. The last point repeats the first.
#[derive(Clone, Debug, PartialEq)]
pub struct KLoop {
    pub points: Vec<[f64; 2]>,
}

impl KLoop {
    pub fn new(mut points: Vec<[f64; 2]>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidInput("a loop needs at least three points".into()));
        }
        if points.first() != points.last() {
            points.push(points[0]);
        }
        Ok(Self { points })
    }

    /// Counter-clockwise circle with n segments.
    pub fn circle(center: [f64; 2], radius: f64, n: usize) -> Result<Self> {
        if !(radius > 0.0) || n < 3 {
            return Err(Error::InvalidInput("circle needs radius > 0 and n ≥ 3".into()));
        }
        let mut pts: Vec<[f64; 2]> = (0..n)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / n as f64;
                [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
            })
            .collect();
        pts.push(pts[0]);
        Ok(Self { points: pts })
    }
}

/// Σ arg(w_{j+1}† w_j) along the loop, in (−π, π]. Gauge invariant.
pub fn berry_phase_loop(states: &dyn BandStates, path: &KLoop) -> Result<f64> {
    let ws = path.points[..path.points.len() - 1]
        .par_iter()
        .map(|&k| states.state(k))
        .collect::<Result<Vec<_>>>()?;
    let n = ws.len();
    let mut prod = C64::new(1.0, 0.0);
    for j in 0..n {
        let o = overlap(&ws[j], &ws[(j + 1) % n], path.points[j])?;
        prod *= o / o.norm();
    }
    Ok(wrap_phase(prod.arg()))
}

/// Phase of the elementary loop a → b → c → d → a.
pub(crate) fn plaquette_phase(a: &Vec6, b: &Vec6, c: &Vec6, d: &Vec6, k: [f64; 2]) -> Result<f64> {
    let p = overlap(a, b, k)? * overlap(b, c, k)? * overlap(c, d, k)? * overlap(d, a, k)?;
    Ok(p.arg())
}

/// Rectangular grid of k nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct KGrid {
    pub kx: Vec<f64>,
    pub ky: Vec<f64>,
}

impl KGrid {
    pub fn uniform(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 || !(x.1 > x.0) || !(y.1 > y.0) {
            return Err(Error::InvalidInput("grid needs at least 2x2 nodes over a non-empty box".into()));
        }
        Ok(Self { kx: crate::roots::lin_grid(x.0, x.1, nx), ky: crate::roots::lin_grid(y.0, y.1, ny) })
    }
}

/// Connection and curvature sampled at plaquette centres.
#[derive(Clone, Debug, PartialEq)]
pub struct BerryField {
    pub centers: Vec<[f64; 2]>,
    pub a: Vec<[f64; 2]>,
    pub f: Vec<f64>,
    /// Total flux Σ F·area through the grid.
    pub flux: f64,
    pub gauge: String,
}

/// F from plaquette phases (gauge invariant). A from the mean link phase of
/// opposite edges, so it is only as good as the gauge of `states`.
pub fn curvature_plaquettes(states: &dyn BandStates, grid: &KGrid, gauge: &str) -> Result<BerryField> {
    let (nx, ny) = (grid.kx.len(), grid.ky.len());
    let nodes: Vec<[f64; 2]> = (0..ny).flat_map(|j| (0..nx).map(move |i| (i, j))).map(|(i, j)| [grid.kx[i], grid.ky[j]]).collect();
    let ws = nodes.par_iter().map(|&k| states.state(k)).collect::<Result<Vec<_>>>()?;
    let at = |i: usize, j: usize| &ws[j * nx + i];
    let mut out = BerryField { centers: vec![], a: vec![], f: vec![], flux: 0.0, gauge: gauge.to_string() };
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let (dx, dy) = (grid.kx[i + 1] - grid.kx[i], grid.ky[j + 1] - grid.ky[j]);
            let center = [0.5 * (grid.kx[i] + grid.kx[i + 1]), 0.5 * (grid.ky[j] + grid.ky[j + 1])];
            let (a, b, c, d) = (at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
            let phase = plaquette_phase(a, b, c, d, center)?;
            let ax = (overlap(a, b, center)?.arg() + overlap(d, c, center)?.arg()) / (2.0 * dx);
            let ay = (overlap(a, d, center)?.arg() + overlap(b, c, center)?.arg()) / (2.0 * dy);
            out.centers.push(center);
            out.a.push([ax, ay]);
            out.f.push(phase / (dx * dy));
            out.flux += phase;
        }
    }
    Ok(out)
}
