//! Circularly polarized plane waves in vacuum: the Berry monopole and
//! geometric phases of paths on the momentum sphere.

use nalgebra::Vector3;
use serde::Serialize;

use crate::consts::{eta0, EPS0};
use crate::em::SixVector;
use crate::{Error, Result, C64};

use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Helicity {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Helicity {
    pub fn sign(self) -> f64 {
        match self {
            Helicity::Plus => 1.0,
            Helicity::Minus => -1.0,
        }
    }
}

/// Connection in the (θ̂, φ̂) basis and curvature as a Cartesian vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpBerry {
    pub a_theta: f64,
    pub a_phi: f64,
    pub f: Vector3<f64>,
}

fn angles(khat: &Vector3<f64>) -> Result<(f64, f64)> {
    let n = khat.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidInput("k direction must be a nonzero finite vector".into()));
    }
    let v = khat / n;
    Ok((v.z.clamp(-1.0, 1.0).acos(), v.y.atan2(v.x)))
}

fn on_axis(theta: f64) -> bool {
    theta.sin().abs() <= 1e-14
}

/// A_θ = 0, A_φ = ±cosθ/(k sinθ), F = ∓k̂/k².
pub fn cp_connection_curvature(khat: &Vector3<f64>, k_mag: f64, helicity: Helicity) -> Result<CpBerry> {
    if !(k_mag > 0.0) {
        return Err(Error::InvalidInput("k_mag must be positive".into()));
    }
    let (theta, _) = angles(khat)?;
    if on_axis(theta) {
        return Err(Error::PolarSingularity);
    }
    let s = helicity.sign();
    Ok(CpBerry {
        a_theta: 0.0,
        a_phi: s * theta.cos() / (k_mag * theta.sin()),
        f: -s * khat.normalize() / (k_mag * k_mag),
    })
}

/// Curvature alone; finite on the poles too.
pub fn cp_curvature(khat: &Vector3<f64>, k_mag: f64, helicity: Helicity) -> Vector3<f64> {
    -helicity.sign() * khat.normalize() / (k_mag * k_mag)
}

/// f = (e±, ∓ i e±/η0)/√(2ε0) with e± = (θ̂ ± iφ̂)/√2.
pub fn cp_envelope_vacuum(khat: &Vector3<f64>, helicity: Helicity) -> Result<SixVector> {
    let (theta, phi) = angles(khat)?;
    if on_axis(theta) {
        return Err(Error::PolarSingularity);
    }
    let s = helicity.sign();
    let th = Vector3::new(theta.cos() * phi.cos(), theta.cos() * phi.sin(), -theta.sin());
    let ph = Vector3::new(-phi.sin(), phi.cos(), 0.0);
    let e: Vector3<C64> = (th.map(|x| C64::new(x, 0.0)) + ph.map(|x| C64::new(0.0, s * x))) * C64::new(0.5f64.sqrt(), 0.0);
    let norm = 1.0 / (2.0 * EPS0).sqrt();
    Ok(SixVector::new(e * C64::new(norm, 0.0), e * C64::new(0.0, -s * norm / eta0())))
}

/// Flux of F through the sphere |k| = k, divided by 2π. F is sampled at the
/// centre of each of `n_theta` polar bands and weighted by the band's area.
pub fn cp_sphere_flux(helicity: Helicity, k_mag: f64, n_theta: usize) -> f64 {
    let dt = PI / n_theta as f64;
    let mut total = 0.0;
    for i in 0..n_theta {
        let (t0, t1) = (i as f64 * dt, (i + 1) as f64 * dt);
        let t = 0.5 * (t0 + t1);
        let kh = Vector3::new(t.sin(), 0.0, t.cos());
        let fr = cp_curvature(&kh, k_mag, helicity).dot(&kh);
        total += fr * k_mag * k_mag * 2.0 * PI * (t0.cos() - t1.cos());
    }
    total / (2.0 * PI)
}

/// Closed polygon of great-circle arcs on the unit sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalPath {
    pub vertices: Vec<Vector3<f64>>,
}

impl SphericalPath {
    /// Normalizes the vertices and closes the path.
    pub fn new(vertices: &[Vector3<f64>]) -> Result<Self> {
        let mut v: Vec<Vector3<f64>> = Vec::with_capacity(vertices.len() + 1);
        for x in vertices {
            let n = x.norm();
            if !(n > 0.0) || !n.is_finite() {
                return Err(Error::DegeneratePath("zero or non-finite vertex"));
            }
            v.push(x / n);
        }
        if v.is_empty() {
            return Err(Error::DegeneratePath("empty path"));
        }
        if (v[0] - v[v.len() - 1]).norm() > 1e-15 {
            v.push(v[0]);
        }
        Ok(Self { vertices: v })
    }

    /// z → x → y → z: one octant.
    pub fn octant() -> Self {
        Self::new(&[Vector3::z(), Vector3::x(), Vector3::y()]).expect("fixed path")
    }

    fn distinct(&self) -> Vec<Vector3<f64>> {
        let mut out: Vec<Vector3<f64>> = Vec::new();
        for v in &self.vertices[..self.vertices.len() - 1] {
            if out.last().is_none_or(|p| (p - v).norm() > 1e-12) {
                out.push(*v);
            }
        }
        while out.len() > 1 && (out[0] - out[out.len() - 1]).norm() <= 1e-12 {
            out.pop();
        }
        out
    }
}

fn tangent_toward(v: &Vector3<f64>, to: &Vector3<f64>) -> Vector3<f64> {
    let t = to - v * to.dot(v);
    t / t.norm()
}

/// Solid angle to the left of the path, in (−2π, 2π], from Gauss-Bonnet:
/// Ω = 2π − Σ turning angles.
pub fn enclosed_solid_angle(path: &SphericalPath) -> Result<f64> {
    let v = path.distinct();
    if v.len() < 2 {
        return Err(Error::DegeneratePath("fewer than two distinct vertices"));
    }
    let n = v.len();
    for i in 0..n {
        if (v[i] + v[(i + 1) % n]).norm() <= 1e-12 {
            return Err(Error::DegeneratePath("antipodal consecutive vertices"));
        }
    }
    if n == 2 {
        return Ok(0.0);
    }
    let mut turning = 0.0;
    for i in 0..n {
        let (prev, cur, next) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
        let t_in = -tangent_toward(&cur, &prev);
        let t_out = tangent_toward(&cur, &next);
        let cross = t_in.cross(&t_out).dot(&cur);
        let dot = t_in.dot(&t_out);
        if cross.abs() <= 1e-14 && dot < 0.0 {
            return Err(Error::DegeneratePath("path reverses on itself"));
        }
        turning += cross.atan2(dot);
    }
    let mut omega = 2.0 * PI - turning;
    while omega > 2.0 * PI + 1e-12 {
        omega -= 4.0 * PI;
    }
    while omega <= -2.0 * PI + 1e-12 {
        omega += 4.0 * PI;
    }
    Ok(omega)
}

/// Geometric phase ∓Ω of a CP state carried around the path.
pub fn spherical_path_phase(path: &SphericalPath, helicity: Helicity) -> Result<f64> {
    Ok(-helicity.sign() * enclosed_solid_angle(path)?)
}

/// ∮ A·dk along the arcs in spherical coordinates whose polar axis is
/// `axis`, by Simpson's rule with `n_per_arc` (even) intervals per arc.
/// Equal to [`spherical_path_phase`] modulo 2π when the path avoids ±axis.
pub fn cp_loop_integral(path: &SphericalPath, helicity: Helicity, axis: &Vector3<f64>, n_per_arc: usize) -> Result<f64> {
    let z = axis.normalize();
    let seed = if z.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let x = (seed - z * seed.dot(&z)).normalize();
    let y = z.cross(&x);
    let n = n_per_arc + n_per_arc % 2;
    let mut total = 0.0;
    for w in path.vertices.windows(2) {
        let (a, b) = (w[0], w[1]);
        let th = a.dot(&b).clamp(-1.0, 1.0).acos();
        if th <= 1e-15 {
            continue;
        }
        if (PI - th) <= 1e-12 {
            return Err(Error::DegeneratePath("antipodal consecutive vertices"));
        }
        let integrand = |t: f64| -> Result<f64> {
            let s = th.sin();
            let v = (a * ((1.0 - t) * th).sin() + b * (t * th).sin()) / s;
            let dv = (-a * ((1.0 - t) * th).cos() + b * (t * th).cos()) * (th / s);
            let (px, py, pz) = (v.dot(&x), v.dot(&y), v.dot(&z));
            let rho2 = px * px + py * py;
            if rho2 <= 1e-24 {
                return Err(Error::PolarSingularity);
            }
            let dphi = (px * dv.dot(&y) - py * dv.dot(&x)) / rho2;
            Ok(pz * dphi)
        };
        let h = 1.0 / n as f64;
        let mut s = integrand(0.0)? + integrand(1.0)?;
        for i in 1..n {
            s += integrand(i as f64 * h)? * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        total += s * h / 3.0;
    }
    Ok(helicity.sign() * total)
}
