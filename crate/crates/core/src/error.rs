use thiserror::Error;

use crate::expr::EvalError;

/// Failures of the geometric operations.
///
/// Most variants carry the parameter value at which the degeneracy was met so
/// that callers (and the CLI) can name it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("curvature degenerates at t={t} (k={k:e})")]
    DegenerateCurvature { t: f64, k: f64 },
    #[error("curve has a cusp (zero velocity) at t={t}")]
    CuspPoint { t: f64 },
    #[error("torsion vanishes at t={t} (tau={tau:e})")]
    TorsionVanishes { t: f64, tau: f64 },
    #[error("evolute has a cusp at t={t} (sigma={sigma:e})")]
    EvoluteCusp { t: f64, sigma: f64 },
    #[error("curve escapes to infinity at t={t}")]
    InfinityEscape { t: f64 },
    #[error("plane family is singular at t={t} (condition number {condition:e})")]
    SingularSystem { t: f64, condition: f64 },
    #[error("integration failed at t={t}: {reason}")]
    IntegrationFailure { t: f64, reason: String },
    #[error("arclengths differ: {a} vs {b}")]
    LengthMismatch { a: f64, b: f64 },
    #[error("curve is not closed (endpoint gap {gap:e})")]
    NotClosed { gap: f64 },
    #[error("monodromy is the identity: every point is fixed")]
    IdentityMonodromy,
    #[error("monodromy is a pure translation: no fixed point")]
    PureTranslation,
    #[error("classification is indeterminate at t={t} (sigma*tau={value:e})")]
    Indeterminate { t: f64, value: f64 },
    #[error("line is parallel to a ruling of the developable at t={t}")]
    LineParallelToRuling { t: f64 },
    #[error("line is tangent to the developed regression edge at t={t}")]
    DegenerateInvolute { t: f64 },
    #[error("parameter t={t} lies outside the curve domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },
    #[error("derivative order {needed} requested, curve supplies {available}")]
    InsufficientOrder { needed: usize, available: usize },
    #[error("expression evaluation failed at t={t}: {source}")]
    Eval { t: f64, source: EvalError },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl GeomError {
    /// The parameter value the failure refers to, when there is one.
    pub fn parameter(&self) -> Option<f64> {
        use GeomError::*;
        match *self {
            DegenerateCurvature { t, .. }
            | CuspPoint { t }
            | TorsionVanishes { t, .. }
            | EvoluteCusp { t, .. }
            | InfinityEscape { t }
            | SingularSystem { t, .. }
            | IntegrationFailure { t, .. }
            | Indeterminate { t, .. }
            | LineParallelToRuling { t }
            | DegenerateInvolute { t }
            | OutOfDomain { t, .. }
            | Eval { t, .. } => Some(t),
            _ => None,
        }
    }
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
