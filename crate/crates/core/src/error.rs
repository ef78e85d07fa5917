use thiserror::Error;

/// Errors produced by the spectral engine, the solvers and the estimate evaluators.
#[derive(Debug, Error)]
pub enum TorusError {
    #[error("incompatible domains: period {left} vs {right}")]
    IncompatibleDomains { left: f64, right: f64 },

    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: u32, right: u32 },

    #[error("undersampled: grid of {n} points per axis, need at least {required}")]
    Undersampled { n: usize, required: usize },

    #[error("invalid grid size {0}: must be a power of two >= 4")]
    InvalidGrid(usize),

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("not invertible on constants: field has nonzero mean")]
    NotInvertibleOnConstants,

    #[error("inadmissible exponents: {0}")]
    InadmissibleExponents(String),

    #[error("drift is not divergence free at t = {t}: |div w| = {divergence:e}")]
    NotDivergenceFree { t: f64, divergence: f64 },

    #[error("blow-up suspected at t = {t}")]
    BlowUp { t: f64 },

    #[error("step rejected: error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    StepRejected { estimate: f64, tolerance: f64 },

    #[error("negative sample {value} at index {index} in {what}")]
    NegativeSample { what: &'static str, index: usize, value: f64 },

    #[error("missing derivative data: {0}")]
    MissingDerivativeData(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = TorusError> = std::result::Result<T, E>;
