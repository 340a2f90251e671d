use std::path::PathBuf;

use thiserror::Error;

use crate::profile::ProfileCurve;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation has no meaning when n = r + 1.
    #[error("{operation} requires q > 0; n = r + 1 is the cylinder case")]
    CylinderRegime { operation: &'static str },

    /// The operation only applies to the 0 < q < 1 or q = 0 regime.
    #[error("{operation} is not applicable for q = {q}")]
    NotApplicable { operation: &'static str, q: f64 },

    /// sinh/cosh would lose all precision past this point.
    #[error("{name} = {value} exceeds the supported cap {cap}")]
    OutOfRange { name: &'static str, value: f64, cap: f64 },

    #[error(
        "quadrature did not converge: value {value:e}, error estimate {error_estimate:e} after {subdivisions} subdivisions"
    )]
    QuadratureNonConvergence {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("root bracket [{lo}, {hi}] does not contain a sign change")]
    NoBracket { lo: f64, hi: f64 },

    #[error("iteration limit reached in {0}")]
    IterationLimit(&'static str),

    /// The catenoid with neck `a` never reaches the requested height.
    #[error("height {t0} is not reached: L({a}) = {half_height}")]
    HeightNotReached { a: f64, t0: f64, half_height: f64 },

    /// Uniqueness of the minimiser is only established for heights below T.
    #[error(
        "height {t0} is outside (0, T) with T = {threshold}; uniqueness of the minimiser is an open question there"
    )]
    UnvalidatedRegime { t0: f64, threshold: f64 },

    #[error("step size underflow at t = {t}, f = {f} after {} accepted steps", .partial.samples.len())]
    StepUnderflow {
        t: f64,
        f: f64,
        partial: Box<ProfileCurve>,
    },

    #[error("ODE step limit {max_steps} reached at t = {t}")]
    StepLimit { max_steps: usize, t: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
