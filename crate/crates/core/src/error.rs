use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("conjugate undefined at boundary (t = 1)")]
    ConjugateAtBoundary,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("r not positive finite (1/p + 1/q - 1 = {0})")]
    RNotPositiveFinite(f64),

    #[error("triple violates 1/p + 1/q = 1 + 1/r (defect {0:e})")]
    RelationViolated(f64),

    #[error("operation requires the classical or reverse regime, got boundary triple ({p}, {q}, {r})")]
    BoundaryRegime { p: f64, q: f64, r: f64 },

    #[error("operation requires the {expected} regime")]
    WrongRegime { expected: &'static str },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid function values: {0}")]
    InvalidValues(String),

    #[error("grid steps differ ({0} vs {1}); resample first")]
    StepMismatch(f64, f64),

    #[error("ratio undefined: {0}")]
    RatioUndefined(&'static str),

    #[error("zero mass")]
    ZeroMass,

    #[error("mass mismatch: {0} vs {1}")]
    MassMismatch(f64, f64),

    #[error("map not differentiable: source vanishes in the window")]
    MapNotDifferentiable,

    #[error("evaluation at {0} is outside the resolved window [{1}, {2}]")]
    OutOfWindow(f64, f64, f64),

    #[error("support leakage: boundary mass fraction {0:e} exceeds {1:e}")]
    SupportLeakage(f64, f64),

    #[error("fit failed: {0}")]
    FitFailed(&'static str),

    #[error("negative perturbed function at epsilon = {0}")]
    NegativePerturbation(f64),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
