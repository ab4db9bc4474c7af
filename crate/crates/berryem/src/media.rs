//! Material models and the symmetry operations on constitutive matrices.

use nalgebra::Vector3;
use serde::Serialize;

use crate::em::{self, c, identity3, ConstantMedium, Mat3, Mat6, MaterialMatrix, MaterialModel};
use crate::{Error, Result, C64};

/// Biased plasma, bias along z. `omega_c` is signed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlasmaParams {
    pub omega_p: f64,
    pub omega_c: f64,
}

/// Scalar entries of the relative permittivity [[e11, i e12, 0], [−i e12, e11, 0], [0, 0, e33]].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gyro {
    pub e11: f64,
    pub e12: f64,
    pub e33: f64,
}

impl Gyro {
    pub fn tensor(&self) -> Mat3 {
        let i = C64::i();
        Mat3::new(
            c(self.e11), i * self.e12, c(0.0),
            -i * self.e12, c(self.e11), c(0.0),
            c(0.0), c(0.0), c(self.e33),
        )
    }

    /// Blend toward the vacuum response: 1 + s(ε − 1).
    pub fn blend(&self, s: f64) -> Gyro {
        Gyro { e11: 1.0 + s * (self.e11 - 1.0), e12: s * self.e12, e33: 1.0 + s * (self.e33 - 1.0) }
    }
}

impl PlasmaParams {
    pub fn new(omega_p: f64, omega_c: f64) -> Result<Self> {
        if !(omega_p > 0.0 && omega_p.is_finite()) {
            return Err(Error::InvalidInput(format!("omega_p must be positive, got {omega_p}")));
        }
        if !omega_c.is_finite() {
            return Err(Error::InvalidInput("omega_c must be finite".into()));
        }
        Ok(Self { omega_p, omega_c })
    }

    fn check(&self, omega: f64) -> Result<()> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidInput(format!("omega must be positive, got {omega}")));
        }
        if (omega - self.omega_c.abs()).abs() <= 1e-9 * omega {
            return Err(Error::ResonanceSingularity { omega, omega_c: self.omega_c });
        }
        Ok(())
    }

    pub fn gyro(&self, omega: f64) -> Result<Gyro> {
        self.check(omega)?;
        let (wp2, wc) = (self.omega_p * self.omega_p, self.omega_c);
        let d = omega * omega - wc * wc;
        Ok(Gyro { e11: 1.0 - wp2 / d, e12: -wc * wp2 / (omega * d), e33: 1.0 - wp2 / (omega * omega) })
    }

    /// ∂ω(ω ε_ij) for the same three scalars.
    pub fn gyro_derivative(&self, omega: f64) -> Result<Gyro> {
        self.check(omega)?;
        let (wp2, wc) = (self.omega_p * self.omega_p, self.omega_c);
        let d = omega * omega - wc * wc;
        Ok(Gyro {
            e11: 1.0 + wp2 * (omega * omega + wc * wc) / (d * d),
            e12: 2.0 * omega * wc * wp2 / (d * d),
            e33: 1.0 + wp2 / (omega * omega),
        })
    }

    pub fn upper_hybrid(&self) -> f64 {
        self.omega_p.hypot(self.omega_c)
    }

    /// Right-hand cutoff, the top edge of the TM gap.
    pub fn omega_r(&self) -> f64 {
        let wc = self.omega_c.abs();
        0.5 * (wc + (wc * wc + 4.0 * self.omega_p * self.omega_p).sqrt())
    }

    pub fn omega_l(&self) -> f64 {
        let wc = self.omega_c.abs();
        0.5 * (-wc + (wc * wc + 4.0 * self.omega_p * self.omega_p).sqrt())
    }
}

pub fn plasma_permittivity(p: &PlasmaParams, omega: f64) -> Result<Mat3> {
    Ok(p.gyro(omega)?.tensor())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NonlocalParams {
    pub base: PlasmaParams,
    pub k_max: f64,
}

impl NonlocalParams {
    pub fn new(base: PlasmaParams, k_max: f64) -> Result<Self> {
        if !(k_max > 0.0 && k_max.is_finite()) {
            return Err(Error::InvalidInput(format!("k_max must be positive, got {k_max}")));
        }
        Ok(Self { base, k_max })
    }

    /// Cutoff factor 1/(1 + k²/k_max²).
    pub fn cutoff(&self, k2: f64) -> f64 {
        1.0 / (1.0 + k2 / (self.k_max * self.k_max))
    }

    pub fn gyro(&self, omega: f64, k2: f64) -> Result<Gyro> {
        Ok(self.base.gyro(omega)?.blend(self.cutoff(k2)))
    }

    pub fn gyro_derivative(&self, omega: f64, k2: f64) -> Result<Gyro> {
        Ok(self.base.gyro_derivative(omega)?.blend(self.cutoff(k2)))
    }
}

fn diag_blocks(eps: &Mat3) -> Mat6 {
    let z = Mat3::zeros();
    em::assemble_material(eps, &z, &z, &identity3()).m
}

/// M_∞ + s(M(ω) − M_∞), with M_∞ = diag(ε0 I, μ0 I).
pub fn regularize_nonlocal(np: &NonlocalParams, omega: f64, k: &Vector3<f64>) -> Result<MaterialMatrix> {
    let g = np.gyro(omega, k.norm_squared())?;
    Ok(MaterialMatrix { m: diag_blocks(&g.tensor()), omega: Some(omega), k: Some(*k) })
}

/// The media shipped with the library.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Medium {
    Vacuum,
    Dielectric { eps: f64 },
    Plasma(PlasmaParams),
    NonlocalPlasma(NonlocalParams),
    Constant(ConstantMedium),
}

impl Medium {
    pub fn plasma(&self) -> Option<&PlasmaParams> {
        match self {
            Medium::Plasma(p) => Some(p),
            Medium::NonlocalPlasma(np) => Some(&np.base),
            _ => None,
        }
    }

    /// In-plane gyrotropic scalars at (ω, |k|²); None for general bianisotropic media.
    pub fn gyro(&self, omega: f64, k2: f64) -> Result<Option<Gyro>> {
        Ok(match self {
            Medium::Vacuum => Some(Gyro { e11: 1.0, e12: 0.0, e33: 1.0 }),
            Medium::Dielectric { eps } => Some(Gyro { e11: *eps, e12: 0.0, e33: *eps }),
            Medium::Plasma(p) => Some(p.gyro(omega)?),
            Medium::NonlocalPlasma(np) => Some(np.gyro(omega, k2)?),
            Medium::Constant(_) => None,
        })
    }

    pub fn gyro_derivative(&self, omega: f64, k2: f64) -> Result<Option<Gyro>> {
        Ok(match self {
            Medium::Plasma(p) => Some(p.gyro_derivative(omega)?),
            Medium::NonlocalPlasma(np) => Some(np.gyro_derivative(omega, k2)?),
            _ => self.gyro(omega, k2)?,
        })
    }
}

impl MaterialModel for Medium {
    fn material(&self, omega: f64, k: &Vector3<f64>) -> Result<MaterialMatrix> {
        match self {
            Medium::Constant(cm) => Ok(cm.0),
            Medium::NonlocalPlasma(np) => regularize_nonlocal(np, omega, k),
            Medium::Plasma(p) => Ok(MaterialMatrix { m: diag_blocks(&p.gyro(omega)?.tensor()), omega: Some(omega), k: None }),
            _ => {
                let g = self.gyro(omega, 0.0)?.expect("isotropic media are gyrotropic");
                Ok(MaterialMatrix::dispersionless(diag_blocks(&g.tensor())))
            }
        }
    }

    fn weight_analytic(&self, omega: f64, k: &Vector3<f64>) -> Option<Result<Mat6>> {
        Some(match self {
            Medium::Constant(cm) => Ok(cm.0.m),
            _ => self
                .gyro_derivative(omega, k.norm_squared())
                .map(|d| diag_blocks(&d.expect("gyrotropic medium").tensor())),
        })
    }

    fn poles(&self) -> Vec<f64> {
        match self.plasma() {
            Some(p) => vec![0.0, p.omega_c.abs()],
            None => Vec::new(),
        }
    }
}

/// T6 = diag(I, −I) applied on both sides.
fn t6_sandwich(m: &Mat6) -> Mat6 {
    Mat6::from_fn(|i, j| if (i < 3) == (j < 3) { m[(i, j)] } else { -m[(i, j)] })
}

/// Given M(ω, k0), returns T6 M*(ω, k0) T6, which is the time-reversed
/// material evaluated at −k0.
pub fn time_reverse_material(m: &MaterialMatrix) -> MaterialMatrix {
    MaterialMatrix { m: t6_sandwich(&m.m.conjugate()), omega: m.omega, k: m.k.map(|k| -k) }
}

/// Given M(ω, k0), returns T6 M(ω, k0) T6, the inverted material at −k0:
/// ε, μ unchanged, ξ, ς negated.
pub fn invert_material(m: &MaterialMatrix) -> MaterialMatrix {
    MaterialMatrix { m: t6_sandwich(&m.m), omega: m.omega, k: m.k.map(|k| -k) }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SymmetryResiduals {
    pub lossless: f64,
    pub tr: f64,
    pub inversion: f64,
    pub reciprocity: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub lossless: bool,
    pub tr_invariant: bool,
    pub inversion_invariant: bool,
    pub reciprocal: bool,
    pub residuals: SymmetryResiduals,
    /// lossless ⇒ (reciprocal ⇔ tr_invariant).
    pub theorem_holds: bool,
}

pub const SYMMETRY_TOL: f64 = 1e-10;

/// Residual-based symmetry classification over sampled ±k.
pub fn classify_symmetry(model: &dyn MaterialModel, omega: f64, ks: &[Vector3<f64>]) -> Result<SymmetryReport> {
    let zero = [Vector3::zeros()];
    let ks = if ks.is_empty() { &zero[..] } else { ks };
    let mut r = SymmetryResiduals { lossless: 0.0, tr: 0.0, inversion: 0.0, reciprocity: 0.0 };
    for k in ks {
        let mp = model.material(omega, k)?.relative();
        let mm = model.material(omega, &-k)?.relative();
        let scale = mp.norm().max(f64::MIN_POSITIVE);
        let rel = |x: Mat6| (mp - x).norm() / scale;
        r.lossless = r.lossless.max(rel(mp.adjoint()));
        r.tr = r.tr.max(rel(t6_sandwich(&mm.conjugate())));
        r.inversion = r.inversion.max(rel(t6_sandwich(&mm)));
        r.reciprocity = r.reciprocity.max(rel(t6_sandwich(&mm.transpose())));
    }
    let lossless = r.lossless <= SYMMETRY_TOL;
    let tr_invariant = r.tr <= SYMMETRY_TOL;
    let reciprocal = r.reciprocity <= SYMMETRY_TOL;
    Ok(SymmetryReport {
        lossless,
        tr_invariant,
        inversion_invariant: r.inversion <= SYMMETRY_TOL,
        reciprocal,
        residuals: r,
        theorem_holds: !lossless || (reciprocal == tr_invariant),
    })
}

/// Which symmetry class a random Hermitian constitutive matrix is drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RandomClass {
    /// Real symmetric ε, μ and imaginary ξ = −ςᵀ (chiral, Pasteur-like).
    Reciprocal,
    /// Generic complex Hermitian blocks.
    Nonreciprocal,
}

/// Random Hermitian, positive-definite constant medium. `uniform` must
/// return samples in [0, 1).
pub fn random_hermitian_medium(class: RandomClass, uniform: &mut dyn FnMut() -> f64) -> ConstantMedium {
    let mut u = || 2.0 * uniform() - 1.0;
    let mut block = |complex: bool| {
        let re = Mat3::from_fn(|_, _| c(u()));
        if complex {
            re + Mat3::from_fn(|_, _| C64::new(0.0, u()))
        } else {
            re
        }
    };
    let complex = class == RandomClass::Nonreciprocal;
    let a = block(complex);
    let b = block(complex);
    let eps = a * a.adjoint() * c(0.3) + identity3() * c(2.0);
    let mu = b * b.adjoint() * c(0.3) + identity3() * c(1.5);
    let xr = block(false) * c(0.25);
    let xi = if complex { xr + block(true) * c(0.25) } else { xr * C64::i() };
    let sigma = xi.adjoint();
    ConstantMedium(em::assemble_material(&eps, &xi, &sigma, &mu))
}

/// Chiral medium with ξ = ς = iκ I (reciprocal, breaks inversion).
pub fn chiral_medium(eps: f64, mu: f64, kappa: f64) -> ConstantMedium {
    let i = identity3();
    let x = i * C64::new(0.0, kappa);
    ConstantMedium(em::assemble_material(&(i * c(eps)), &x, &(-x), &(i * c(mu))))
}
