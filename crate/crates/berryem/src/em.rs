//! Six-vector algebra, constitutive and curl matrices, and the Hermitian
//! eigenproblem N(k) f = ω M f.

use nalgebra::{DMatrix, Matrix3, Matrix6, SymmetricEigen, Vector3, Vector6};

use crate::consts::{C0, EPS0, MU0};
use crate::{Error, Result, C64};

pub type Mat3 = Matrix3<C64>;
pub type Mat6 = Matrix6<C64>;
pub type Vec6 = Vector6<C64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Field envelope (E; H).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SixVector {
    pub e: Vector3<C64>,
    pub h: Vector3<C64>,
}

impl SixVector {
    pub fn new(e: Vector3<C64>, h: Vector3<C64>) -> Self {
        Self { e, h }
    }

    pub fn zeros() -> Self {
        Self { e: Vector3::zeros(), h: Vector3::zeros() }
    }

    pub fn from_vec6(v: &Vec6) -> Self {
        Self { e: Vector3::new(v[0], v[1], v[2]), h: Vector3::new(v[3], v[4], v[5]) }
    }

    pub fn to_vec6(&self) -> Vec6 {
        Vec6::new(self.e[0], self.e[1], self.e[2], self.h[0], self.h[1], self.h[2])
    }

    pub fn is_finite(&self) -> bool {
        self.e.iter().chain(self.h.iter()).all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { e: self.e * s, h: self.h * s }
    }

    /// √⟨f|f⟩ under `weight`.
    pub fn norm_with(&self, weight: &Mat6) -> f64 {
        inner_product(self, self, weight).re.max(0.0).sqrt()
    }

    pub fn normalized_with(&self, weight: &Mat6) -> Result<Self> {
        let n = self.norm_with(weight);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidInput("cannot normalize a null six-vector".into()));
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }
}

/// ⟨a|b⟩ = b† W a.
pub fn inner_product(a: &SixVector, b: &SixVector, weight: &Mat6) -> C64 {
    (b.to_vec6().adjoint() * weight * a.to_vec6())[(0, 0)]
}

/// Plain b† a on the weighted representation.
pub fn vdot(a: &Vec6, b: &Vec6) -> C64 {
    a.dotc(b).conj()
}

/// Constitutive matrix [[ε0 ε, ξ/c], [ς/c, μ0 μ]] with evaluation metadata.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialMatrix {
    pub m: Mat6,
    pub omega: Option<f64>,
    pub k: Option<Vector3<f64>>,
}

fn scale_diag() -> [f64; 6] {
    let (a, b) = (EPS0.sqrt(), MU0.sqrt());
    [a, a, a, b, b, b]
}

/// S^{-1} m S^{-1} with S = diag(√ε0, √μ0): the dimensionless [[ε, ξ], [ς, μ]].
pub fn to_relative(m: &Mat6) -> Mat6 {
    let s = scale_diag();
    Mat6::from_fn(|i, j| m[(i, j)] / (s[i] * s[j]))
}

pub fn from_relative(r: &Mat6) -> Mat6 {
    let s = scale_diag();
    Mat6::from_fn(|i, j| r[(i, j)] * (s[i] * s[j]))
}

impl MaterialMatrix {
    pub fn dispersionless(m: Mat6) -> Self {
        Self { m, omega: None, k: None }
    }

    pub fn relative(&self) -> Mat6 {
        to_relative(&self.m)
    }

    /// ‖m − m†‖ / ‖m‖ in dimensionless form.
    pub fn hermiticity_residual(&self) -> f64 {
        let r = self.relative();
        (r - r.adjoint()).norm() / r.norm().max(f64::MIN_POSITIVE)
    }

    pub fn block(&self, row: usize, col: usize) -> Mat3 {
        self.m.fixed_view::<3, 3>(3 * row, 3 * col).into_owned()
    }
}

pub fn assemble_material(eps: &Mat3, xi: &Mat3, sigma: &Mat3, mu: &Mat3) -> MaterialMatrix {
    let mut m = Mat6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&(eps * C64::new(EPS0, 0.0)));
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&(xi / C64::new(C0, 0.0)));
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(&(sigma / C64::new(C0, 0.0)));
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&(mu * C64::new(MU0, 0.0)));
    MaterialMatrix::dispersionless(m)
}

pub fn vacuum_material() -> MaterialMatrix {
    let i = Mat3::identity();
    let z = Mat3::zeros();
    assemble_material(&i, &z, &z, &i)
}

/// Matrix of v ↦ k × v.
pub fn cross_matrix(k: &Vector3<f64>) -> Mat3 {
    let c = |x: f64| C64::new(x, 0.0);
    Mat3::new(
        ZERO, c(-k[2]), c(k[1]),
        c(k[2]), ZERO, c(-k[0]),
        c(-k[1]), c(k[0]), ZERO,
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurlMatrix {
    pub n: Mat6,
}

/// N = [[0, −k×], [k×, 0]], so that N f = ω M f for e^{−iωt}, e^{+ik·r}.
pub fn assemble_curl(k: &Vector3<f64>) -> CurlMatrix {
    let kx = cross_matrix(k);
    let mut n = Mat6::zeros();
    n.fixed_view_mut::<3, 3>(0, 3).copy_from(&(-kx));
    n.fixed_view_mut::<3, 3>(3, 0).copy_from(&kx);
    CurlMatrix { n }
}

pub(crate) fn hermitian_check(m: &DMatrix<C64>, tol: f64) -> Result<()> {
    let scale = m.norm();
    let res = (m - m.adjoint()).norm();
    if res > tol * scale {
        return Err(Error::NotHermitian(res / scale.max(f64::MIN_POSITIVE)));
    }
    Ok(())
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
pub fn eigh_sorted(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let n = eig.eigenvalues.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

/// Returns (m^{1/2}, m^{-1/2}) for a Hermitian positive-definite matrix.
pub fn hermitian_sqrt_pair(m: &DMatrix<C64>) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    hermitian_check(m, 1e-10)?;
    let (vals, vecs) = eigh_sorted(m);
    if vals[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite(vals[0]));
    }
    let n = vals.len();
    let d = |f: fn(f64) -> f64| {
        DMatrix::from_fn(n, n, |r, c| if r == c { C64::new(f(vals[r]), 0.0) } else { ZERO })
    };
    let s = &vecs * d(f64::sqrt) * vecs.adjoint();
    let si = &vecs * d(|x| 1.0 / x.sqrt()) * vecs.adjoint();
    Ok(((&s + s.adjoint()) * C64::new(0.5, 0.0), (&si + si.adjoint()) * C64::new(0.5, 0.0)))
}

pub fn hermitian_sqrt(m: &Mat6) -> Result<Mat6> {
    let (s, _) = hermitian_sqrt_pair(&to_dyn(m))?;
    Ok(from_dyn(&s))
}

pub(crate) fn to_dyn(m: &Mat6) -> DMatrix<C64> {
    DMatrix::from_fn(6, 6, |r, c| m[(r, c)])
}

pub(crate) fn from_dyn(m: &DMatrix<C64>) -> Mat6 {
    Mat6::from_fn(|r, c| m[(r, c)])
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenMode {
    pub omega: f64,
    pub k: Vector3<f64>,
    pub band: usize,
    pub f: SixVector,
    /// Weighted envelope M̃^{1/2} S f with M̃ = S^{-1} M S^{-1}, S = diag(√ε0, √μ0).
    /// Equal to M^{1/2} f for block-diagonal M, a fixed unitary away from it
    /// otherwise; w†w = f†M f either way.
    pub w: SixVector,
    pub weight: Mat6,
    /// Number of modes sharing this eigenvalue.
    pub degeneracy: usize,
}

/// All six modes of a dispersionless medium, sorted by ω ascending.
pub fn solve_eigenmodes(material: &MaterialMatrix, k: &Vector3<f64>) -> Result<Vec<EigenMode>> {
    if material.omega.is_some() {
        return Err(Error::InvalidInput("solve_eigenmodes needs a dispersionless material".into()));
    }
    // Work in the dimensionless form: S^{-1} N S^{-1} = c N.
    let rel = to_dyn(&material.relative());
    let (_, rsi) = hermitian_sqrt_pair(&rel)?;
    let n = to_dyn(&assemble_curl(k).n) * C64::new(C0, 0.0);
    let ht = &rsi * n * &rsi;
    let (vals, vecs) = eigh_sorted(&ht);
    let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = 1e-9 * scale.max(f64::MIN_POSITIVE);
    let s = scale_diag();
    let mut modes = Vec::with_capacity(6);
    for (j, &om) in vals.iter().enumerate() {
        let g = &rsi * vecs.column(j);
        let f = Vec6::from_fn(|i, _| g[i] / s[i]);
        let w = Vec6::from_fn(|i, _| vecs[(i, j)]);
        let degeneracy = vals.iter().filter(|v| (*v - om).abs() <= tol).count();
        modes.push(EigenMode {
            omega: om,
            k: *k,
            band: j,
            f: SixVector::from_vec6(&f),
            w: SixVector::from_vec6(&w),
            weight: material.m,
            degeneracy,
        });
    }
    Ok(modes)
}

/// Modes with ω > 0, re-indexed 1.. in ascending order.
pub fn positive_bands(modes: &[EigenMode]) -> Vec<EigenMode> {
    let scale = modes.iter().fold(0.0f64, |a, m| a.max(m.omega.abs()));
    modes
        .iter()
        .filter(|m| m.omega > 1e-9 * scale)
        .enumerate()
        .map(|(i, m)| EigenMode { band: i + 1, ..m.clone() })
        .collect()
}

/// ‖N f − ω M f‖ / ‖N f‖.
pub fn eigen_residual(n: &CurlMatrix, m: &Mat6, f: &SixVector, omega: f64) -> f64 {
    let v = f.to_vec6();
    let nf = n.n * v;
    let r = nf - m * v * C64::new(omega, 0.0);
    r.norm() / nf.norm().max(f64::MIN_POSITIVE)
}

/// Anything that yields a constitutive matrix at (ω, k).
pub trait MaterialModel: Send + Sync {
    fn material(&self, omega: f64, k: &Vector3<f64>) -> Result<MaterialMatrix>;

    /// ∂ω(ωM) in closed form, when the model knows it.
    fn weight_analytic(&self, _omega: f64, _k: &Vector3<f64>) -> Option<Result<Mat6>> {
        None
    }

    /// Frequencies (rad/s, ≥ 0) where M blows up.
    fn poles(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// ∂ω(ωM) by central difference with step ω·1e−6.
pub fn energy_weight_fd(model: &dyn MaterialModel, omega: f64, k: &Vector3<f64>) -> Result<Mat6> {
    let h = omega * 1e-6;
    guard_poles(model, omega, h)?;
    let mp = model.material(omega + h, k)?.m;
    let mm = model.material(omega - h, k)?.m;
    Ok((mp * C64::new(omega + h, 0.0) - mm * C64::new(omega - h, 0.0)) / C64::new(2.0 * h, 0.0))
}

fn guard_poles(model: &dyn MaterialModel, omega: f64, h: f64) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::EvaluationOutsideDomain(format!("omega = {omega:e} must be positive")));
    }
    for p in model.poles() {
        if (omega - p).abs() <= 10.0 * h {
            return Err(Error::EvaluationOutsideDomain(format!(
                "omega = {omega:e} rad/s is within 10 steps of the pole at {p:e} rad/s"
            )));
        }
    }
    Ok(())
}

/// Energy weight ∂ω(ωM): analytic when available, otherwise finite difference.
pub fn energy_weight(model: &dyn MaterialModel, omega: f64, k: &Vector3<f64>) -> Result<Mat6> {
    guard_poles(model, omega, omega * 1e-6)?;
    match model.weight_analytic(omega, k) {
        Some(w) => w,
        None => energy_weight_fd(model, omega, k),
    }
}

/// Constant (dispersionless) medium from an explicit matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantMedium(pub MaterialMatrix);

impl MaterialModel for ConstantMedium {
    fn material(&self, _omega: f64, _k: &Vector3<f64>) -> Result<MaterialMatrix> {
        Ok(self.0)
    }
}

pub(crate) fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub(crate) fn identity3() -> Mat3 {
    Mat3::from_diagonal_element(ONE)
}
