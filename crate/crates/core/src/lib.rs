//! Security workbench for entanglement-based quantum key distribution
//! tested with the Wigner inequality.
//!
//! Three layers:
//!
//! - closed-form joint probabilities and security functionals for the
//!   singlet state and for separable eavesdropper preparations
//!   ([`model`], [`metrics`]),
//! - attack functionals over the eavesdropper's preparation angles plus a
//!   deterministic grid-and-simplex search of the attack landscape
//!   ([`adversary`], [`optimizer`]),
//! - seeded Monte Carlo protocol sessions with sifting transcripts, key
//!   extraction, empirical estimators, and key-rate accounting
//!   ([`protocol`]).
//!
//! Everything is deterministic: computations are pure functions, session
//! randomness is counter-based on (seed, round), and parallel evaluation
//! cannot change any reported value.

pub mod adversary;
pub mod error;
pub mod export;
pub mod metrics;
pub mod model;
mod numeric;
pub mod optimizer;
pub mod protocol;

pub use adversary::{
    intercept_resend_w_eve, w_eve, w_eve_integrand, wtilde_eve, wtilde_eve_integrand,
    GeneralAttack, InterceptResendAttack,
};
pub use error::{Error, Result};
pub use metrics::{
    mirrored_modified_wigner, modified_wigner, qber, secure_original, security_report, wigner_w,
    SecurityReport,
};
pub use model::{
    joint_prob, product_joint_prob, singlet_joint_prob, Angle, AttackAtom, AttackDistribution,
    Detector, JointOutcome, Party, SettingId, SettingIndex, SourceModel,
};
pub use optimizer::{
    find_min_intercept_resend, find_min_w_eve, find_min_wtilde_eve, grid_scan, refine,
    AttackObjective, OptimizationResult, ScanGrid,
};
pub use protocol::{
    estimate_probability, run_session, sample_round, sift, sift_with_transcript, Estimate,
    ProtocolConfig, ProtocolVariant, RoundRecord, RoundRng, SettingProbabilities, SiftMessage,
    SiftMessageKind, SiftingResult, Stream,
};
