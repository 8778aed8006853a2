use thiserror::Error;

/// Crate-wide error type.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("set descriptor is not valid JSON: {0}")]
    MalformedJson(String),
    #[error("interval list is empty")]
    EmptySet,
    #[error("degenerate interval [{0}, {1}]: single points are excluded")]
    DegenerateInterval(f64, f64),
    #[error("invalid interval bounds [{0}, {1}]")]
    InvalidInterval(f64, f64),
    #[error("point {0} does not belong to the set")]
    PointNotInSet(f64),
    #[error("point {0} is not strictly interior to the set")]
    PointNotInterior(f64),
    #[error("density is not defined at {0} (endpoint or exterior point)")]
    DensityUndefined(f64),
    #[error("cantor ratio {0} must lie strictly between 0 and 1/2")]
    InvalidCantorRatio(f64),
    #[error("parameter {name} = {value} out of range: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("integration bounds [{0}, {1}] are not increasing")]
    InvalidBounds(f64, f64),
    #[error("tail integration did not converge after {windows} windows (last contribution {last:e})")]
    DivergenceSuspected { windows: usize, last: f64 },
    #[error("linear system is singular")]
    SingularSystem,
    #[error("equilibrium mass check failed: total mass {0} deviates from 1 beyond tolerance")]
    MassCheckFailed(f64),
    #[error("Robin constant cross-check spread {spread:e} exceeds {tolerance:e}: quadrature inconsistency")]
    RobinInconsistent { spread: f64, tolerance: f64 },
    #[error("evaluation point must satisfy Im z > 0, got Im z = {0}")]
    NotUpperHalfPlane(f64),
    #[error("comb map value inconsistent: |Im f - g| = {0:e} at the evaluation point")]
    CombIdentityViolated(f64),
    #[error("finite-difference ladder is not Cauchy (tail {0:e}): normal derivative diverges or does not settle")]
    LadderNotCauchy(f64),
    #[error("linear program unbounded")]
    LpUnbounded,
    #[error("linear program exceeded {0} simplex iterations")]
    LpMaxIterations(usize),
    #[error("linear program internal inconsistency: {0}")]
    LpInconsistent(String),
    #[error("extremal ratio {ratio} exceeds the Bernstein ceiling 1 + {slack:e}")]
    RatioCeilingExceeded { ratio: f64, slack: f64 },
}

/// Coarse classification used by the CLI to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad user input: malformed descriptors, out-of-range arguments.
    Input,
    /// The computation itself detected an inconsistency or failed to converge.
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            MalformedJson(_) | EmptySet | DegenerateInterval(..) | InvalidInterval(..)
            | PointNotInSet(_) | PointNotInterior(_) | DensityUndefined(_)
            | InvalidCantorRatio(_) | InvalidParameter { .. } | InvalidBounds(..)
            | NotUpperHalfPlane(_) => ErrorKind::Input,
            DivergenceSuspected { .. } | SingularSystem | MassCheckFailed(_)
            | RobinInconsistent { .. } | CombIdentityViolated(_) | LadderNotCauchy(_)
            | LpUnbounded | LpMaxIterations(_) | LpInconsistent(_)
            | RatioCeilingExceeded { .. } => ErrorKind::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
