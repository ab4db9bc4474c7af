//! Scenario configs: JSON in, validated jobs out.

use std::path::PathBuf;

use berryem::consts::{cyclotron_from_bz, thz, C0};
use berryem::media::{Medium, NonlocalParams, PlasmaParams};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Bands,
    BerryField,
    Chern,
    Spp,
    Confinement,
    Qcheck,
    Emitter,
    Symmetry,
    Geophase,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Bands => "bands",
            Command::BerryField => "berry-field",
            Command::Chern => "chern",
            Command::Spp => "spp",
            Command::Confinement => "confinement",
            Command::Qcheck => "qcheck",
            Command::Emitter => "emitter",
            Command::Symmetry => "symmetry",
            Command::Geophase => "geophase",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaterialKind {
    Plasma,
    NonlocalPlasma,
}

/// Frequencies in cyclic THz. `k_max_over_c` is the cutoff in units of
/// |ωc|/c, so k_max = 100|ωc|/c reads as 100.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    #[serde(rename = "type")]
    pub kind: MaterialKind,
    pub omega_p_thz: f64,
    pub omega_c_thz: Option<f64>,
    pub b_tesla: Option<f64>,
    pub k_max_over_c: Option<f64>,
    /// Relative permittivity across the interface; absent means a perfect conductor.
    pub eps_s: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub from: f64,
    pub to: f64,
    pub n: usize,
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.from];
        }
        (0..self.n).map(|i| self.from + (self.to - self.from) * i as f64 / (self.n - 1) as f64).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pol {
    Tm,
    Te,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    Forward,
    Backward,
}

fn default_k_max_norm() -> f64 {
    3.0
}
fn default_n_k() -> usize {
    301
}
fn default_pols() -> Vec<Pol> {
    vec![Pol::Tm]
}
fn default_bands() -> Vec<Band> {
    vec![Band::Upper, Band::Lower]
}
fn default_chern_n() -> usize {
    256
}
fn default_periods() -> usize {
    64
}
fn default_max_offset() -> f64 {
    5.0
}
fn default_samples() -> usize {
    100
}
fn default_symmetry_f() -> f64 {
    10.0
}
fn default_arc() -> usize {
    2000
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BandsParams {
    /// Largest k·c/ωp.
    #[serde(default = "default_k_max_norm")]
    pub k_max_norm: f64,
    #[serde(default = "default_n_k")]
    pub n_k: usize,
    #[serde(default = "default_pols")]
    pub polarizations: Vec<Pol>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BerryFieldParams {
    pub band: Band,
    /// Node ranges in units of ωp/c.
    pub kx_norm: [f64; 2],
    pub ky_norm: [f64; 2],
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ChernParams {
    #[serde(default = "default_bands")]
    pub bands: Vec<Band>,
    #[serde(default = "default_chern_n")]
    pub n: usize,
    /// Optional refinement ladder; the integer must hold along it.
    pub ladder: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SppParams {
    pub f_thz: Sweep,
    pub direction: Option<Dir>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfinementParams {
    pub omega_over_omega_p: Sweep,
    /// Defaults to the material bias.
    pub omega_c_over_omega_p: Option<Sweep>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct QcheckParams {
    pub f_thz: f64,
    pub delta_phi_deg: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterParams {
    /// Far-field phase g(φ) = order·φ.
    pub order: i32,
    pub f_thz: f64,
    pub vibration_thz: f64,
    pub dphi0: f64,
    #[serde(default = "default_periods")]
    pub periods: usize,
    /// Largest |f − f_carrier|/F_vib written out.
    #[serde(default = "default_max_offset")]
    pub max_offset: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetryParams {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_symmetry_f")]
    pub f_thz: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GeophaseParams {
    /// Directions visited on the unit sphere; defaults to z, x, y.
    pub vertices: Option<Vec<[f64; 3]>>,
    #[serde(default = "default_arc")]
    pub n_per_arc: usize,
    #[serde(default = "default_arc")]
    pub sphere_n_theta: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Job {
    Bands(BandsParams),
    BerryField(BerryFieldParams),
    Chern(ChernParams),
    Spp(SppParams),
    Confinement(ConfinementParams),
    Qcheck(QcheckParams),
    Emitter(EmitterParams),
    Symmetry(SymmetryParams),
    Geophase(GeophaseParams),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    command: Command,
    material: Option<MaterialSpec>,
    output: Option<PathBuf>,
    #[serde(default)]
    params: Option<Value>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub command: Command,
    pub material: Option<MaterialSpec>,
    pub output: Option<PathBuf>,
    pub job: Job,
    /// The config as read, echoed into the metadata.
    pub raw: Value,
}

impl MaterialSpec {
    pub fn omega_p(&self) -> f64 {
        thz(self.omega_p_thz)
    }

    pub fn omega_c(&self) -> f64 {
        match (self.omega_c_thz, self.b_tesla) {
            (Some(f), _) => thz(f),
            (None, Some(b)) => cyclotron_from_bz(b),
            (None, None) => 0.0,
        }
    }

    pub fn plasma(&self) -> berryem::Result<PlasmaParams> {
        PlasmaParams::new(self.omega_p(), self.omega_c())
    }

    pub fn medium(&self) -> berryem::Result<Medium> {
        let p = self.plasma()?;
        Ok(match self.kind {
            MaterialKind::Plasma => Medium::Plasma(p),
            MaterialKind::NonlocalPlasma => {
                Medium::NonlocalPlasma(NonlocalParams::new(p, self.k_max_over_c.unwrap_or(f64::NAN) * p.omega_c.abs() / C0)?)
            }
        })
    }

    fn check(&self, errs: &mut Vec<String>) {
        if !(self.omega_p_thz > 0.0 && self.omega_p_thz.is_finite()) {
            errs.push(format!("material.omega_p_thz: must be positive, got {}", self.omega_p_thz));
        }
        match (self.omega_c_thz, self.b_tesla) {
            (Some(_), Some(_)) => errs.push("material: give omega_c_thz or b_tesla, not both".into()),
            (None, None) => errs.push("material: one of omega_c_thz or b_tesla is required".into()),
            (Some(f), None) if !f.is_finite() => errs.push("material.omega_c_thz: must be finite".into()),
            (None, Some(b)) if !b.is_finite() => errs.push("material.b_tesla: must be finite".into()),
            _ => {}
        }
        match (self.kind, self.k_max_over_c) {
            (MaterialKind::NonlocalPlasma, None) => errs.push("material.k_max_over_c: required for nonlocal-plasma".into()),
            (MaterialKind::NonlocalPlasma, Some(k)) if !(k > 0.0 && k.is_finite()) => {
                errs.push(format!("material.k_max_over_c: must be positive, got {k}"))
            }
            (MaterialKind::Plasma, Some(_)) => errs.push("material.k_max_over_c: only applies to nonlocal-plasma".into()),
            _ => {}
        }
        if self.kind == MaterialKind::NonlocalPlasma && self.omega_c() == 0.0 {
            errs.push("material: the nonlocal cutoff scales with |omega_c|, which is zero".into());
        }
        if let Some(e) = self.eps_s {
            if !e.is_finite() || e == 0.0 {
                errs.push(format!("material.eps_s: must be finite and nonzero, got {e}"));
            }
        }
    }

    fn valid(&self) -> bool {
        let mut e = Vec::new();
        self.check(&mut e);
        e.is_empty()
    }
}

fn config_error(field: &str, err: impl std::fmt::Display) -> CliError {
    CliError::Config(vec![if field.is_empty() || field == "." { err.to_string() } else { format!("{field}: {err}") }])
}

fn params<T: serde::de::DeserializeOwned>(v: Option<Value>) -> Result<T, CliError> {
    let v = v.unwrap_or_else(|| Value::Object(Default::default()));
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        config_error(&format!("params.{path}").replace("params..", "params"), e.into_inner())
    })
}

/// Parses and validates a scenario. All problems found are reported together.
pub fn validate(text: &str) -> Result<Scenario, CliError> {
    let raw: Value = serde_json::from_str(text).map_err(|e| config_error("", format!("malformed JSON: {e}")))?;
    let de = &mut serde_json::Deserializer::from_str(text);
    let parsed: RawScenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        config_error(&path, e.into_inner())
    })?;
    let job = match parsed.command {
        Command::Bands => Job::Bands(params(parsed.params)?),
        Command::BerryField => Job::BerryField(params(parsed.params)?),
        Command::Chern => Job::Chern(params(parsed.params)?),
        Command::Spp => Job::Spp(params(parsed.params)?),
        Command::Confinement => Job::Confinement(params(parsed.params)?),
        Command::Qcheck => Job::Qcheck(params(parsed.params)?),
        Command::Emitter => Job::Emitter(params(parsed.params)?),
        Command::Symmetry => Job::Symmetry(params(parsed.params)?),
        Command::Geophase => Job::Geophase(params(parsed.params)?),
    };
    let s = Scenario { command: parsed.command, material: parsed.material, output: parsed.output, job, raw };
    let errs = s.problems();
    if errs.is_empty() {
        Ok(s)
    } else {
        Err(CliError::Config(errs))
    }
}

fn check_sweep(name: &str, s: &Sweep, min_n: usize, errs: &mut Vec<String>) {
    if !(s.from.is_finite() && s.to.is_finite()) {
        errs.push(format!("{name}: endpoints must be finite"));
    } else if s.n > 1 && !(s.to > s.from) {
        errs.push(format!("{name}: need from < to, got [{}, {}]", s.from, s.to));
    }
    if s.n < min_n {
        errs.push(format!("{name}.n: at least {min_n} points needed, got {}", s.n));
    }
}

/// ε11 ≠ 0, off the cyclotron resonance and above zero.
fn check_frequency(name: &str, f_thz: f64, m: &MaterialSpec, need_eps11: bool, errs: &mut Vec<String>) {
    if !(f_thz > 0.0 && f_thz.is_finite()) {
        errs.push(format!("{name}: frequency must be positive, got {f_thz}"));
        return;
    }
    if !m.valid() {
        return;
    }
    let w = thz(f_thz);
    match m.plasma().and_then(|p| p.gyro(w)) {
        Err(berryem::Error::ResonanceSingularity { .. }) => {
            errs.push(format!("{name}: resonance singularity at {f_thz} THz (|omega_c|)"))
        }
        Err(e) => errs.push(format!("{name}: {e}")),
        Ok(g) if need_eps11 && g.e11.abs() <= 1e-12 => errs.push(format!("{name}: eps11 = 0 at {f_thz} THz")),
        Ok(_) => {}
    }
}

impl Scenario {
    fn problems(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let needs_material = !matches!(self.job, Job::Emitter(_) | Job::Symmetry(_) | Job::Geophase(_));
        match &self.material {
            Some(m) => m.check(&mut errs),
            None if needs_material => errs.push(format!("material: required for {}", self.command.name())),
            None => {}
        }
        let m = self.material.as_ref();
        match &self.job {
            Job::Bands(b) => {
                if !(b.k_max_norm > 0.0 && b.k_max_norm.is_finite()) {
                    errs.push(format!("params.k_max_norm: must be positive, got {}", b.k_max_norm));
                }
                if b.n_k < 2 {
                    errs.push(format!("params.n_k: at least 2 points needed, got {}", b.n_k));
                }
                if b.polarizations.is_empty() {
                    errs.push("params.polarizations: empty".into());
                }
            }
            Job::BerryField(b) => {
                for (name, r) in [("params.kx_norm", b.kx_norm), ("params.ky_norm", b.ky_norm)] {
                    if !(r[1] > r[0]) {
                        errs.push(format!("{name}: need a range [lo, hi] with lo < hi"));
                    }
                }
                if b.n < 2 {
                    errs.push(format!("params.n: at least 2 nodes per axis needed, got {}", b.n));
                }
            }
            Job::Chern(c) => {
                if let Some(m) = m {
                    if m.kind != MaterialKind::NonlocalPlasma && m.valid() && m.omega_c() != 0.0 {
                        errs.push("material.type: Chern numbers of a biased plasma need the nonlocal-plasma model".into());
                    }
                }
                if c.bands.is_empty() {
                    errs.push("params.bands: empty".into());
                }
                for n in std::iter::once(&c.n).chain(c.ladder.iter().flatten()) {
                    if *n < 16 {
                        errs.push(format!("params: polar grid of {n} is below the minimum of 16"));
                    }
                }
            }
            Job::Spp(s) => {
                check_sweep("params.f_thz", &s.f_thz, 3, &mut errs);
                if let Some(m) = m {
                    if s.f_thz.n <= 100_000 {
                        for f in s.f_thz.points() {
                            check_frequency("params.f_thz", f, m, true, &mut errs);
                        }
                    }
                }
            }
            Job::Confinement(c) => {
                check_sweep("params.omega_over_omega_p", &c.omega_over_omega_p, 1, &mut errs);
                if let Some(s) = &c.omega_c_over_omega_p {
                    check_sweep("params.omega_c_over_omega_p", s, 1, &mut errs);
                }
                if c.omega_over_omega_p.from <= 0.0 {
                    errs.push("params.omega_over_omega_p: frequencies must be positive".into());
                }
            }
            Job::Qcheck(q) => {
                if let Some(m) = m {
                    check_frequency("params.f_thz", q.f_thz, m, true, &mut errs);
                    if m.valid() && errs.is_empty() {
                        if let Ok(p) = m.plasma() {
                            match berryem::bulk::tm_effective_eps(&p, thz(q.f_thz)) {
                                Ok(e) if e > 0.0 => {}
                                _ => errs.push(format!("params.f_thz: no propagating TM wave at {} THz (eps_eff <= 0)", q.f_thz)),
                            }
                        }
                    }
                }
                if q.delta_phi_deg.is_empty() {
                    errs.push("params.delta_phi_deg: empty".into());
                }
                if q.delta_phi_deg.iter().any(|d| !(d.abs() < 90.0)) {
                    errs.push("params.delta_phi_deg: angles must lie in (-90, 90)".into());
                }
            }
            Job::Emitter(e) => {
                if !(e.f_thz > 0.0 && e.vibration_thz > 0.0 && e.vibration_thz < e.f_thz / 10.0) {
                    errs.push("params.vibration_thz: need 0 < vibration_thz < f_thz/10".into());
                }
                if e.periods < 32 {
                    errs.push(format!("params.periods: at least 32 vibration periods needed, got {}", e.periods));
                }
                let carrier = e.f_thz / e.vibration_thz * e.periods as f64;
                if carrier.is_finite() && (carrier - carrier.round()).abs() > 1e-9 * carrier {
                    errs.push(format!("params: f_thz/vibration_thz·periods = {carrier} must be an integer"));
                }
                if !(e.dphi0.abs() <= 0.1) {
                    errs.push(format!("params.dphi0: |dphi0| must not exceed 0.1 rad, got {}", e.dphi0));
                }
                if !(e.max_offset > 0.0) {
                    errs.push("params.max_offset: must be positive".into());
                }
            }
            Job::Symmetry(s) => {
                if s.samples == 0 {
                    errs.push("params.samples: at least one sample needed".into());
                }
                match m {
                    Some(m) => check_frequency("params.f_thz", s.f_thz, m, false, &mut errs),
                    None if !(s.f_thz > 0.0) => errs.push("params.f_thz: frequency must be positive".into()),
                    None => {}
                }
            }
            Job::Geophase(g) => {
                if let Some(v) = &g.vertices {
                    if v.len() < 2 {
                        errs.push("params.vertices: at least two directions needed".into());
                    }
                    if v.iter().any(|x| !(x.iter().map(|c| c * c).sum::<f64>() > 0.0)) {
                        errs.push("params.vertices: zero vector".into());
                    }
                }
                if g.n_per_arc < 2 || g.sphere_n_theta < 2 {
                    errs.push("params: n_per_arc and sphere_n_theta must be at least 2".into());
                }
            }
        }
        errs
    }
}
