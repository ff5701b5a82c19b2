use thiserror::Error;

/// Errors raised by chart construction, integration and the reduced-system
/// quadratures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("magnetic density vanishes near r = {r} (|b| = {value:e})")]
    ZeroMagneticField { r: f64, value: f64 },

    #[error("action coordinate is not strictly monotone near r = {r}")]
    NonMonotoneAction { r: f64 },

    #[error("point {x} lies outside the open interval ({lo}, {hi})")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("R(a) = {value} is not positive at a = {a}")]
    NonPositiveR { a: f64, value: f64 },

    #[error("F(a) = {value} is not positive at a = {a}")]
    NonPositiveF { a: f64, value: f64 },

    #[error("parallel radius f(r) = {value} is not positive at r = {r}")]
    NonPositiveRadius { r: f64, value: f64 },

    #[error("scale parameter must be positive, got {0}")]
    NonPositiveEpsilon(f64),

    #[error("trajectory left the chart at t = {t} (a = {a})")]
    LeftDomain { t: f64, a: f64 },

    #[error("implicit stage did not converge at t = {t} (residual {residual:e})")]
    NoConvergence { t: f64, residual: f64 },

    #[error("no circular orbit through a = {a}: F'(a) = {f_prime:e}")]
    NoCircularOrbit { a: f64, f_prime: f64 },

    #[error("speed {speed:e} at sample {index} is too small to define a curvature")]
    DegenerateSpeed { index: usize, speed: f64 },

    #[error("no turning points for eps = {eps}, E = {ehat}, kappa = {kappa}: {reason}")]
    NoTurningPoints { eps: f64, ehat: f64, kappa: f64, reason: String },

    #[error("quadrature not converged with {nodes} nodes (last change {change:e})")]
    QuadratureNotConverged { nodes: usize, change: f64 },

    #[error("Newton inversion for (E, K) failed at c = {c}, h = {h}")]
    NewtonFailed { c: f64, h: f64 },

    #[error("chart is not homogeneous: defect {defect:e} exceeds {tolerance:e}")]
    NotHomogeneous { defect: f64, tolerance: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context { context: context.into(), source: Box::new(self) }
    }

    /// The innermost error, with all context layers stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::InvalidInput(format!("i/o error: {e}"))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
