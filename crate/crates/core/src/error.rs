use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the numerical operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("gradient norm {grad_norm:e} is below the critical floor {floor:e}")]
    CriticalPoint { grad_norm: f64, floor: f64 },
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("finite-difference stencil failed: {0}")]
    StencilFailure(String),
    #[error("quadrature did not reach tolerance: estimate {estimate:e}, error {error:e}")]
    QuadratureFailure { estimate: f64, error: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("growth exponent alpha is required when p > 2")]
    MissingAlpha,
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("integral is unbounded: {0}")]
    Unbounded(String),
    #[error("Hessian is singular at the bubble center for p > 2")]
    CenterSingularity,
    #[error("radial integration failed at r = {r:e}: {reason}")]
    StepFailure { r: f64, reason: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no convergence after {iterations} iterations: {reason}")]
    NoConvergence { iterations: usize, reason: String },
    #[error("query radius {r:e} lies beyond the solution range {r_max:e}")]
    InterpolationDomain { r: f64, r_max: f64 },
}

impl Error {
    /// Stable snake-case name of the variant, used in machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "invalid_params",
            Error::CriticalPoint { .. } => "critical_point",
            Error::NonFinite(_) => "non_finite",
            Error::StencilFailure(_) => "stencil_failure",
            Error::QuadratureFailure { .. } => "quadrature_failure",
            Error::Domain(_) => "domain",
            Error::MissingAlpha => "missing_alpha",
            Error::DegenerateFit(_) => "degenerate_fit",
            Error::Unbounded(_) => "unbounded",
            Error::CenterSingularity => "center_singularity",
            Error::StepFailure { .. } => "step_failure",
            Error::InvalidInput(_) => "invalid_input",
            Error::NoConvergence { .. } => "no_convergence",
            Error::InterpolationDomain { .. } => "interpolation_domain",
        }
    }
}
