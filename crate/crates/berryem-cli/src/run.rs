//! Dispatch of validated scenarios to the library, and the artifacts they write.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use berryem::berry::{
    chern_ladder, chern_number, cp_loop_integral, cp_sphere_flux, curvature_plaquettes, enclosed_solid_angle, q_peak,
    spherical_path_phase, BulkBandStates, ChernResult, Helicity, KGrid, SphericalPath,
};
use berryem::bulk::{solve_bulk_band, tm_gap, BandLabel, Polarization};
use berryem::consts::{thz, to_thz, C0};
use berryem::edge::{confinement_map, spp_band, Direction};
use berryem::emitter::{farfield_connection, vibration_spectrum, FarFieldModel};
use berryem::media::{classify_symmetry, random_hermitian_medium, RandomClass};
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::scenario::{Band, Dir, Job, MaterialSpec, Pol, Scenario, Sweep};
use crate::CliError;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides the scenario's `output`.
    pub out_dir: Option<PathBuf>,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub primary: PathBuf,
    pub metadata: PathBuf,
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    num(x.unwrap_or(f64::NAN))
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

enum Artifact {
    Csv(Table),
    Json(Value),
}

fn label(b: Band) -> BandLabel {
    match b {
        Band::Lower => BandLabel::Lower,
        Band::Upper => BandLabel::Upper,
    }
}

fn band_name(b: BandLabel) -> &'static str {
    match b {
        BandLabel::Lower => "lower",
        BandLabel::Upper => "upper",
    }
}

fn material(s: &Scenario) -> &MaterialSpec {
    s.material.as_ref().expect("validated scenario carries a material")
}

pub fn run(s: &Scenario, opts: &RunOptions) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let (artifact, grid) = match &s.job {
        Job::Bands(p) => bands(material(s), p.k_max_norm, p.n_k, &p.polarizations)?,
        Job::BerryField(p) => berry_field(material(s), p.band, p.kx_norm, p.ky_norm, p.n)?,
        Job::Chern(p) => chern(material(s), &p.bands, p.n, p.ladder.as_deref())?,
        Job::Spp(p) => spp(material(s), &p.f_thz, p.direction)?,
        Job::Confinement(p) => confinement(material(s), &p.omega_over_omega_p, p.omega_c_over_omega_p.as_ref())?,
        Job::Qcheck(p) => qcheck(material(s), p.f_thz, &p.delta_phi_deg)?,
        Job::Emitter(p) => emitter(p.order, p.f_thz, p.vibration_thz, p.dphi0, p.periods, p.max_offset)?,
        Job::Symmetry(p) => symmetry(s.material.as_ref(), p.samples, p.f_thz, opts.seed)?,
        Job::Geophase(p) => geophase(p.vertices.as_deref(), p.n_per_arc, p.sphere_n_theta)?,
    };
    let dir = opts.out_dir.clone().or_else(|| s.output.clone()).unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let stem = s.command.name();
    let primary = match &artifact {
        Artifact::Csv(t) => {
            let path = dir.join(format!("{stem}.csv"));
            write_csv(&path, t)?;
            path
        }
        Artifact::Json(v) => {
            let path = dir.join(format!("{stem}.json"));
            fs::write(&path, serde_json::to_string_pretty(v)? + "\n")?;
            path
        }
    };
    let meta = json!({
        "command": stem,
        "version": env!("CARGO_PKG_VERSION"),
        "library_version": berryem::VERSION,
        "inputs": s.raw,
        "seed": opts.seed,
        "threads": rayon::current_num_threads(),
        "grid": grid,
        "primary": primary.file_name().map(|f| f.to_string_lossy().into_owned()),
        "runtime_s": start.elapsed().as_secs_f64(),
    });
    let metadata = dir.join(format!("{stem}.meta.json"));
    fs::write(&metadata, serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(RunReport { primary, metadata })
}

fn write_csv(path: &Path, t: &Table) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&t.header)?;
    for r in &t.rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn bands(m: &MaterialSpec, k_max_norm: f64, n_k: usize, pols: &[Pol]) -> Result<(Artifact, Value), CliError> {
    let medium = m.medium()?;
    let wp = m.omega_p();
    let ks = Sweep { from: 0.0, to: k_max_norm, n: n_k }.points();
    let mut rows = Vec::new();
    for pol in pols {
        let (pol, name, labels) = match pol {
            Pol::Tm => (Polarization::TM, "TM", vec![BandLabel::Lower, BandLabel::Upper]),
            Pol::Te => (Polarization::TE, "TE", vec![BandLabel::Upper]),
        };
        for b in labels {
            let block: Vec<Vec<String>> = ks
                .par_iter()
                .map(|&kn| {
                    let k = kn * wp / C0;
                    let d = solve_bulk_band(&medium, k, b, pol)?;
                    Ok(vec![num(kn), num(to_thz(d.omega)), band_name(b).into(), name.into(), num(k), num(d.omega)])
                })
                .collect::<berryem::Result<_>>()?;
            rows.extend(block);
        }
    }
    let header = vec!["k_norm", "f_thz", "band", "polarization", "k_rad_per_m", "omega_rad_per_s"];
    Ok((Artifact::Csv(Table { header, rows }), json!({ "k_norm": [0.0, k_max_norm], "n_k": n_k })))
}

fn berry_field(m: &MaterialSpec, band: Band, kx: [f64; 2], ky: [f64; 2], n: usize) -> Result<(Artifact, Value), CliError> {
    let k_ref = m.omega_p() / C0;
    let states = BulkBandStates::new(m.medium()?, label(band), Polarization::TM)?;
    let grid = KGrid::uniform((kx[0] * k_ref, kx[1] * k_ref), (ky[0] * k_ref, ky[1] * k_ref), n, n)?;
    let field = curvature_plaquettes(&states, &grid, &states.gauge.tag())?;
    let rows = field
        .centers
        .iter()
        .zip(&field.a)
        .zip(&field.f)
        .map(|((c, a), f)| vec![num(c[0] / k_ref), num(c[1] / k_ref), num(a[0] * k_ref), num(a[1] * k_ref), num(f * k_ref * k_ref)])
        .collect();
    let header = vec!["kx_norm", "ky_norm", "A_x", "A_y", "F_z"];
    let grid = json!({ "nodes_per_axis": n, "kx_norm": kx, "ky_norm": ky, "gauge": field.gauge, "flux_over_2pi": field.flux / (2.0 * std::f64::consts::PI) });
    Ok((Artifact::Csv(Table { header, rows }), grid))
}

fn chern_entry(r: &ChernResult) -> Value {
    json!({
        "band": band_name(r.band),
        "value": r.value,
        "nearest_integer": r.nearest_integer,
        "deviation": r.deviation,
        "raw_flux": r.raw_flux,
        "boundary_correction": r.boundary_correction,
        "max_plaquette_phase": r.max_plaquette_phase,
        "grid": r.grid,
    })
}

fn chern(m: &MaterialSpec, bands: &[Band], n: usize, ladder: Option<&[usize]>) -> Result<(Artifact, Value), CliError> {
    let medium = m.medium()?;
    let mut out = Vec::new();
    for b in bands {
        match ladder {
            Some(l) => out.extend(chern_ladder(&medium, label(*b), l)?.iter().map(chern_entry)),
            None => out.push(chern_entry(&chern_number(&medium, label(*b), n)?)),
        }
    }
    let grid = json!({ "n": n, "ladder": ladder });
    Ok((Artifact::Json(Value::Array(out)), grid))
}

fn spp(m: &MaterialSpec, f: &Sweep, dir: Option<Dir>) -> Result<(Artifact, Value), CliError> {
    let p = m.plasma()?;
    let dir = match dir {
        Some(Dir::Forward) => Direction::Forward,
        Some(Dir::Backward) => Direction::Backward,
        // ε12 has the opposite sign to ωc above the resonance
        None if p.omega_c > 0.0 => Direction::Backward,
        None => Direction::Forward,
    };
    let omegas: Vec<f64> = f.points().into_iter().map(thz).collect();
    let k_ref = p.omega_p / C0;
    let pts = spp_band(&omegas, m.eps_s, &p, dir)?;
    let rows = pts
        .iter()
        .map(|b| {
            vec![
                num(to_thz(b.omega)),
                opt(b.k_spp.map(|k| k / k_ref)),
                opt(b.alpha_s.map(|a| a / k_ref)),
                opt(b.alpha_p.map(|a| a / k_ref)),
                opt(b.v_g.map(|v| v / C0)),
                (b.in_gap as u8).to_string(),
                num(b.omega),
                opt(b.k_spp),
            ]
        })
        .collect();
    let header = vec!["f_thz", "k_spp_norm", "alpha_s_norm", "alpha_p_norm", "v_g_over_c", "in_gap", "omega_rad_per_s", "k_spp_rad_per_m"];
    let (g0, g1) = tm_gap(&berryem::media::Medium::Plasma(p))?;
    let grid = json!({
        "f_thz": [f.from, f.to],
        "n": f.n,
        "direction": format!("{dir:?}").to_lowercase(),
        "eps_s": m.eps_s.map(Value::from).unwrap_or_else(|| "perfect conductor".into()),
        "gap_thz": [to_thz(g0), to_thz(g1)],
        "bulk_model": "local",
    });
    Ok((Artifact::Csv(Table { header, rows }), grid))
}

fn confinement(m: &MaterialSpec, w: &Sweep, wc: Option<&Sweep>) -> Result<(Artifact, Value), CliError> {
    let wp = m.omega_p();
    let omegas: Vec<f64> = w.points().iter().map(|x| x * wp).collect();
    let wcs: Vec<f64> = match wc {
        Some(s) => s.points().iter().map(|x| x * wp).collect(),
        None => vec![m.omega_c()],
    };
    let pts = confinement_map(&omegas, &wcs, wp)?;
    let rows = pts
        .iter()
        .map(|c| vec![num(c.omega / wp), num(c.omega_c / wp), opt(c.alpha_p_norm)])
        .collect();
    let peaks: Vec<Value> = wcs
        .iter()
        .map(|&bias| {
            let col: Vec<_> = pts.iter().filter(|c| c.omega_c == bias).copied().collect();
            let peak = berryem::edge::confinement_peak(&col).map(|(_, w)| w / wp);
            json!({ "omega_c_over_omega_p": bias / wp, "peak_omega_over_omega_p": peak, "upper_hybrid_over_omega_p": (1.0 + (bias / wp).powi(2)).sqrt() })
        })
        .collect();
    let header = vec!["omega_over_omega_p", "omega_c_over_omega_p", "alpha_p_norm"];
    Ok((Artifact::Csv(Table { header, rows }), json!({ "n_omega": omegas.len(), "n_omega_c": wcs.len(), "peaks": peaks })))
}

fn qcheck(m: &MaterialSpec, f: f64, degs: &[f64]) -> Result<(Artifact, Value), CliError> {
    let p = m.plasma()?;
    let rows = degs
        .par_iter()
        .map(|&d| {
            let pk = q_peak(&p, thz(f), d.to_radians())?;
            Ok(vec![num(d), num(pk.omega_t), num(pk.q_max), num(pk.incremental_phase)])
        })
        .collect::<berryem::Result<Vec<_>>>()?;
    let header = vec!["delta_phi_deg", "omega_t_peak_rad", "q_max", "a_phi_k_dphi_rad"];
    Ok((Artifact::Csv(Table { header, rows }), json!({ "f_thz": f, "omega_t_scan": [-std::f64::consts::PI, std::f64::consts::PI] })))
}

fn emitter(order: i32, f: f64, vib: f64, dphi0: f64, periods: usize, max_offset: f64) -> Result<(Artifact, Value), CliError> {
    let model = FarFieldModel::vortex(order);
    let s = vibration_spectrum(&model, 1.0, thz(f), thz(vib), dphi0, periods)?;
    let rows = s
        .lines
        .iter()
        .filter(|l| l.offset.abs() <= max_offset + 1e-12)
        .map(|l| vec![num(l.offset), num(l.rel_db)])
        .collect();
    let k0 = thz(f) / C0;
    let a_phi = farfield_connection(&model, 0.0, k0)?;
    let side = s.at_offset(1.0).map(|l| l.amplitude / s.carrier_amplitude);
    let grid = json!({
        "samples_per_carrier_period": berryem::emitter::SAMPLES_PER_PERIOD,
        "vibration_periods": periods,
        "a_phi_m": a_phi,
        "upper_sideband_ratio": side,
        "expected_ratio": (a_phi * k0 * dphi0).abs() / 2.0,
    });
    Ok((Artifact::Csv(Table { header: vec!["f_offset_over_Omega", "amplitude_rel_carrier_db"], rows }), grid))
}

fn symmetry(m: Option<&MaterialSpec>, samples: usize, f: f64, seed: u64) -> Result<(Artifact, Value), CliError> {
    let w = thz(f);
    let k0 = w / C0;
    let ks = [Vector3::new(1.0, 2.0, -0.5) * k0, Vector3::new(-3.0, 0.1, 0.7) * k0, Vector3::new(0.0, 0.0, 0.0)];
    let flag = |b: bool| if b { "true".to_string() } else { "false".to_string() };
    let row = |id: String, class: &str, r: berryem::media::SymmetryReport| {
        vec![id, class.to_string(), flag(r.lossless), flag(r.reciprocal), flag(r.tr_invariant), flag(r.inversion_invariant), flag(r.theorem_holds)]
    };
    let mut rows = Vec::new();
    if let Some(m) = m {
        rows.push(row("material".into(), "plasma", classify_symmetry(&m.medium()?, w, &ks)?));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for i in 0..samples {
        let (class, name) = if i % 2 == 0 { (RandomClass::Reciprocal, "reciprocal") } else { (RandomClass::Nonreciprocal, "nonreciprocal") };
        let medium = random_hermitian_medium(class, &mut || rng.gen::<f64>());
        let r = classify_symmetry(&medium, w, &ks)?;
        failures += !r.theorem_holds as usize;
        rows.push(row(i.to_string(), name, r));
    }
    let header = vec!["sample", "class", "lossless", "reciprocal", "tr_invariant", "inversion_invariant", "theorem_holds"];
    Ok((Artifact::Csv(Table { header, rows }), json!({ "samples": samples, "f_thz": f, "theorem_failures": failures })))
}

/// Polar axis for the loop integral, as far as possible from the path.
fn clear_axis(path: &SphericalPath) -> Vector3<f64> {
    let mut probes = Vec::new();
    for w in path.vertices.windows(2) {
        for t in [0.0, 0.25, 0.5, 0.75] {
            let v = w[0] * (1.0 - t) + w[1] * t;
            if v.norm() > 1e-9 {
                probes.push(v.normalize());
            }
        }
    }
    let mean: Vector3<f64> = probes.iter().sum();
    let mut cands = vec![Vector3::x(), -Vector3::x(), Vector3::y(), -Vector3::y(), Vector3::z(), -Vector3::z()];
    if mean.norm() > 1e-9 {
        cands.insert(0, -mean.normalize());
    }
    let clearance = |a: &Vector3<f64>| probes.iter().map(|p| 1.0 - p.dot(a).abs()).fold(f64::INFINITY, f64::min);
    cands.into_iter().max_by(|a, b| clearance(a).total_cmp(&clearance(b))).unwrap()
}

fn geophase(vertices: Option<&[[f64; 3]]>, n_per_arc: usize, n_theta: usize) -> Result<(Artifact, Value), CliError> {
    let path = match vertices {
        Some(v) => SphericalPath::new(&v.iter().map(|x| Vector3::new(x[0], x[1], x[2])).collect::<Vec<_>>())?,
        None => SphericalPath::octant(),
    };
    let axis = clear_axis(&path);
    let omega = enclosed_solid_angle(&path)?;
    let mut rows = Vec::new();
    for (h, name) in [(Helicity::Plus, "+"), (Helicity::Minus, "-")] {
        rows.push(vec![
            name.to_string(),
            num(omega),
            num(spherical_path_phase(&path, h)?),
            num(cp_loop_integral(&path, h, &axis, n_per_arc)?),
            num(cp_sphere_flux(h, 1.0, n_theta)),
        ]);
    }
    let header = vec!["helicity", "solid_angle", "berry_phase", "loop_integral", "sphere_chern"];
    let grid = json!({ "vertices": path.vertices.iter().map(|v| [v.x, v.y, v.z]).collect::<Vec<_>>(), "loop_axis": [axis.x, axis.y, axis.z], "n_per_arc": n_per_arc, "sphere_n_theta": n_theta });
    Ok((Artifact::Csv(Table { header, rows }), grid))
}
