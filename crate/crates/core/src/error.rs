//! Crate-wide error type.

use thiserror::Error;

use crate::config::ConfigError;
use crate::expr::ExprError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} must be a power of two and at least 16")]
    GridSize(usize),

    #[error("derivative order {order} not supported here (allowed: {allowed})")]
    DerivativeOrder { order: u32, allowed: &'static str },

    #[error("grid sizes differ: {0} vs {1}")]
    GridMismatch(usize, usize),

    #[error("power-law fit needs at least 4 samples, got {0}")]
    FitTooFewSamples(usize),

    #[error("power-law fit requires strictly decreasing, positive eps values")]
    FitBadEps,

    #[error(
        "residual {0:.3e} is not positive; it has hit the floating-point floor, shrink the eps range"
    )]
    FitNonPositiveResidual(f64),

    #[error("map is not orientation preserving: slope {min_slope:.3e} at node {node}")]
    Monotonicity { min_slope: f64, node: usize },

    #[error("nodewise inversion stalled at node {node} (residual {residual:.3e}); raise the grid size")]
    InversionStalled { node: usize, residual: f64 },

    #[error("Newton solve did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("singular Jacobian in Newton solve (pivot {0:.3e})")]
    SingularJacobian(f64),

    #[error("cocycle integrand requires positive slopes, found {0:.3e}")]
    CocycleDomain(f64),

    #[error("potential rejected: {0}")]
    Potential(String),

    #[error("embedding violates the diffeomorphism margin: eps*max|v'| = {0:.3e} >= 0.5")]
    EmbeddingMargin(f64),

    #[error("field blew up at t = {t:.6}: {detail}")]
    BlowUp { t: f64, detail: String },

    #[error("zero mode of the momentum drifted to {0:.3e} while alpha = 0")]
    ZeroModeViolation(f64),

    #[error("(alpha, beta) = (0, 0) does not define an evolution equation")]
    NotEvolvable,

    #[error("state with alpha = 0 must have zero mean (Galilean gauge), got mean {0:.3e}")]
    GaugeViolation(f64),

    #[error(
        "scaling transform incompatible with the 2*pi-periodic domain: 1/(lambda*mu) = {0} is not a nonzero integer"
    )]
    IncompatibleScaling(f64),

    #[error("Galilean part with d != 3c leaves the equation family (c = {c}, d = {d})")]
    SkewGalilean { c: f64, d: f64 },

    #[error("time step {dt} and horizon {t_span} are inconsistent")]
    BadTimeStep { dt: f64, t_span: f64 },

    #[error("a discrete path needs at least two elements, got {0}")]
    PathTooShort(usize),

    #[error("step {index}: {source}")]
    StepFailed { index: usize, source: Box<Error> },

    #[error("self-test failed: {failed} of {total} checks")]
    SelfTest { failed: usize, total: usize },

    #[error(transparent)]
    Expr(#[from] ExprError),

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit-code class for the CLI: validation failures are distinguished
    /// from numerical failures discovered mid-run.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::StepFailed { source, .. } => source.is_numerical(),
            _ => matches!(
                self,
                Error::Monotonicity { .. }
                    | Error::InversionStalled { .. }
                    | Error::NoConvergence { .. }
                    | Error::SingularJacobian(_)
                    | Error::CocycleDomain(_)
                    | Error::BlowUp { .. }
                    | Error::ZeroModeViolation(_)
                    | Error::FitNonPositiveResidual(_)
            ),
        }
    }
}
