use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("matrix is not Hermitian (relative residual {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("evaluation outside model domain: {0}")]
    EvaluationOutsideDomain(String),
    #[error("resonance singularity at omega = {omega:e} rad/s (|omega_c| = {omega_c:e} rad/s)")]
    ResonanceSingularity { omega: f64, omega_c: f64 },
    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),
    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(&'static str),
    #[error("no root in bracket: {0}")]
    NoRootInBracket(String),
    #[error("evanescent branch: {0}")]
    EvanescentBranch(&'static str),
    #[error("band not found: {0}")]
    BandNotFound(String),
    #[error("degenerate point: overlap magnitude {0:e}")]
    DegeneratePoint(f64),
    #[error("degenerate subspace: {0}")]
    DegenerateSubspace(String),
    #[error("not converged: {0}")]
    NonConvergent(String),
    #[error("connection is singular at the poles (sin theta = 0)")]
    PolarSingularity,
    #[error("degenerate path: {0}")]
    DegeneratePath(&'static str),
    #[error("decay constant off the proper sheet")]
    ImproperSheet,
    #[error("no SPP solution: {0}")]
    NoSolution(String),
    #[error("below plasma frequency: eps11 = {0} <= 0")]
    BelowPlasmaFrequency(f64),
    #[error("perturbation too large: |dphi| = {0} > 0.1 rad")]
    PerturbationTooLarge(f64),
    #[error("insufficient resolution: {0}")]
    ResolutionInsufficient(String),
    #[error("model is not nonlocally regularized: {0}")]
    NotRegularized(&'static str),
}
