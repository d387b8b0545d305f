use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` = {value} out of range: {expected}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("family `{family}` expects {expected} parameters, got {got}")]
    ParameterArity {
        family: &'static str,
        expected: &'static str,
        got: usize,
    },

    #[error("invalid mixing weights: {0}")]
    InvalidWeights(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("horizon {horizon} too short: vanishing at t = {t_star} falls inside the final probe window")]
    HorizonTooShort { horizon: f64, t_star: f64 },

    #[error("rate integration failed at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: String },

    #[error("quadrature failed to reach tolerance {tol:e} (estimated error {error:e})")]
    QuadratureFailure { tol: f64, error: f64 },

    #[error("propagator undefined at interior grid point t = {t}; split the grid at singular points")]
    SingularGrid { t: f64 },

    #[error("operation not supported for the `{0}` family")]
    UnsupportedFamily(&'static str),

    #[error("step size too large: |local| * dt = {0} exceeds 0.1")]
    StepSizeTooLarge(f64),

    #[error("s = {s} lies within 1e-6 of a pole or zero at {pole}")]
    PoleProximity { s: f64, pole: String },

    #[error("{0}")]
    Domain(String),
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ParameterOutOfRange { .. } => "ParameterOutOfRange",
            Error::ParameterArity { .. } => "ParameterArity",
            Error::InvalidWeights(_) => "InvalidWeights",
            Error::InvalidState(_) => "InvalidState",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::HorizonTooShort { .. } => "HorizonTooShort",
            Error::IntegrationFailure { .. } => "IntegrationFailure",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::SingularGrid { .. } => "SingularGrid",
            Error::UnsupportedFamily(_) => "UnsupportedFamily",
            Error::StepSizeTooLarge(_) => "StepSizeTooLarge",
            Error::PoleProximity { .. } => "PoleProximity",
            Error::Domain(_) => "DomainError",
        }
    }
}
