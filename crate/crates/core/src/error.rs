//! Crate-wide error type.

use crate::model::Party;

/// Everything that can go wrong across the workbench.
///
/// Variants split into input validation (bad angles, distributions,
/// configurations) and numerical failures (an objective evaluating to a
/// non-finite value). [`Error::is_numerical`] distinguishes the two for
/// callers that map errors to exit codes.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("angle must be finite, got {0}")]
    NonFiniteAngle(f64),

    #[error("attack distribution needs at least one atom")]
    EmptyDistribution,

    #[error("atom weight must be finite and non-negative, got {0}")]
    InvalidWeight(f64),

    #[error("atom weights must sum to 1 within 1e-12, got {0}")]
    UnnormalizedWeights(f64),

    #[error("grid resolution must be at least 2, got {0}")]
    Resolution(usize),

    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),

    #[error("objective evaluated to a non-finite value at ({phi_a}, {phi_b})")]
    NonFiniteObjective { phi_a: f64, phi_b: f64 },

    #[error("session must contain at least one pair")]
    EmptySession,

    #[error("sacrifice fraction must lie in [0, 1], got {0}")]
    SacrificeFraction(f64),

    #[error("{party:?} setting probabilities invalid: {reason}")]
    SettingProbabilities { party: Party, reason: String },

    #[error("sift was given {got} records but the config declares {expected} pairs")]
    SessionMismatch { expected: u64, got: u64 },
}

impl Error {
    /// True for failures of the computation itself rather than of its inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonFiniteObjective { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
