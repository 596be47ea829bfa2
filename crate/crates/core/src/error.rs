use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree {m} is not supported here (maximum {max}); use the quadrature evaluator")]
    UnsupportedDegree { m: usize, max: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid perturbation spec: {0}")]
    InvalidSpec(String),

    #[error("target not reachable: {0}")]
    UnreachableTarget(String),

    #[error("quadrature did not converge (error estimate {estimate:e} after {subdivisions} subdivisions)")]
    QuadratureFailure { estimate: f64, subdivisions: usize },

    #[error("polynomial vanishes at interval endpoint {0}; nudge the endpoint")]
    EndpointRoot(String),

    #[error("degree too small: {0}")]
    DegreeTooSmall(String),

    #[error("degenerate family: {0}")]
    DegenerateFamily(String),

    #[error("wrong number of targets: expected {expected}, got {got}")]
    WrongTargetCount { expected: usize, got: usize },

    #[error("degenerate targets {subset:?}: {reason}")]
    DegenerateTargets { subset: Vec<usize>, reason: String },

    #[error("linear system too ill-conditioned (condition number {cond:e})")]
    IllConditioned { cond: f64 },

    #[error("configuration [[{i},{j}]] not supported for m={m} (holomorphic={holomorphic}): {reason}")]
    NotSupported {
        i: usize,
        j: usize,
        m: usize,
        holomorphic: bool,
        reason: String,
    },

    #[error("could not certify configuration [[{i},{j}]] after {attempts} attempts (last got [[{got_i},{got_j}]])")]
    RealizeFailed {
        i: usize,
        j: usize,
        attempts: usize,
        got_i: usize,
        got_j: usize,
    },

    #[error("sliding motion on the switching line at z = {at}")]
    Sliding { at: Complex64 },

    #[error("integrator exceeded {0} steps")]
    StepLimit(usize),

    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),

    #[error("orbit left the period annulus: {0}")]
    Escape(String),

    #[error("bisection did not converge: {0}")]
    NonConvergence(String),

    #[error("unknown model '{0}'")]
    UnknownModel(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors that mean "the numbers could not be certified" rather than "the input is bad".
    pub fn is_certification_failure(&self) -> bool {
        matches!(
            self,
            Error::QuadratureFailure { .. }
                | Error::RealizeFailed { .. }
                | Error::IllConditioned { .. }
                | Error::NonConvergence(_)
        )
    }
}
